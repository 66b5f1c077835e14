"""
Module banc_essai.py
Interface en ligne de commande du banc d'essai : run | report | oracle |
verify | replay | gen-dataset
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from arbre import METHODES
from base_donnees import BaseEnregistrements
from ecriture_creative import ecrire_instances, generer_instances
from experience import (
    IDENTIQUE,
    TACHES,
    ConfigExperience,
    charger_config,
    config_preset,
    executer_experience,
    fusionner,
    rejouer,
)
from jeu24 import (
    charger_jeu_donnees,
    canonicaliser_texte,
    ecrire_jeu_donnees,
    generer_jeu_donnees,
    resoudre_oracle,
    verifier_texte,
)
from modeles import TableTarifs
from rapports import GenerateurRapports, ecrire_rapport

logger = logging.getLogger(__name__)

BACKENDS_CLI = {"simulated": "simule", "http": "http"}
PRESET_PAR_TACHE = {"game24": "game24-t2ot", "creative-writing": "cw-t2ot"}


def configurer_journalisation(verbeux: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbeux else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s : %(message)s",
    )


def construire_config(args: argparse.Namespace) -> ConfigExperience:
    """
    Configuration du run : fichier (--config) ou preset de la tâche, puis options

    Raises:
        IOError, ValueError: Configuration illisible ou invalide
    """
    if args.config:
        base = charger_config(args.config).to_dict()
    else:
        base = config_preset(PRESET_PAR_TACHE[args.task or "game24"]).to_dict()
    surcharges = {}
    if args.task:
        surcharges["tache"] = args.task
    if args.method:
        surcharges["methode"] = args.method
    if args.dataset:
        surcharges["jeu_donnees"] = args.dataset
    if args.size is not None:
        surcharges["taille_jeu_donnees"] = args.size
    if args.seed is not None:
        surcharges["graine"] = args.seed
    if args.repeats is not None:
        surcharges["repetitions"] = args.repeats
    if args.out:
        surcharges["sortie"] = args.out
    if args.parallel is not None:
        surcharges["parallelisme"] = args.parallel
    if args.backend:
        surcharges.setdefault("backend", {})["type"] = BACKENDS_CLI[args.backend]
    if args.policy:
        surcharges.setdefault("backend", {})["politique"] = args.policy
    return ConfigExperience.depuis_dict(fusionner(base, surcharges))


def commande_run(args: argparse.Namespace) -> int:
    try:
        config = construire_config(args)
        enregistrements, _ = executer_experience(config, afficher=not args.quiet)
    except (IOError, ValueError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    incomplets = sum(1 for e in enregistrements if not e["complet"])
    print(f"✅ {len(enregistrements)} runs terminés ({incomplets} incomplets) → {config.sortie}")
    return 0


def commande_report(args: argparse.Namespace) -> int:
    chemin = Path(args.records) if args.records else Path(args.out) / "enregistrements.json"
    if not chemin.exists():
        print(f"❌ Fichier introuvable : {chemin}", file=sys.stderr)
        return 2
    try:
        enregistrements = BaseEnregistrements(str(chemin)).filtrer(tache=args.task, methode=args.method)
    except IOError as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    if not enregistrements:
        print(f"❌ Aucun enregistrement retenu dans {chemin}", file=sys.stderr)
        return 2
    tarifs = TableTarifs(args.prix_prompt, args.prix_generation)
    generateur = GenerateurRapports(tarifs)
    bundle = generateur.generer(enregistrements, args.instance)
    ecrire_rapport(bundle, args.out)
    if not args.quiet:
        generateur.afficher_rapport(bundle)
    return 0


def commande_oracle(args: argparse.Namespace) -> int:
    try:
        if args.dataset:
            instances = charger_jeu_donnees(args.dataset)
        elif args.nombres:
            instances = [tuple(args.nombres)]
        else:
            print("❌ Donner quatre nombres ou --dataset", file=sys.stderr)
            return 2
        for origine in instances:
            solutions = sorted(resoudre_oracle(origine))
            print(json.dumps({
                "instance": " ".join(map(str, origine)),
                "statut": "solvable" if solutions else "unsolvable",
                "types": solutions,
            }, ensure_ascii=False))
    except (IOError, ValueError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    return 0


def commande_verify(args: argparse.Namespace) -> int:
    if verifier_texte(args.expression, args.nombres):
        print(f"✅ {args.expression} = 24 (forme canonique {canonicaliser_texte(args.expression)})")
        return 0
    print(f"❌ {args.expression} n'est pas une solution pour {' '.join(map(str, args.nombres))}")
    return 1


def commande_replay(args: argparse.Namespace) -> int:
    if not Path(args.records).exists():
        print(f"❌ Fichier introuvable : {args.records}", file=sys.stderr)
        return 2
    try:
        base = BaseEnregistrements(args.records)
        enregistrements = [base.obtenir_par_id(args.id)] if args.id else base.obtenir_tous()
    except (IOError, KeyError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    if not enregistrements:
        print("Aucun enregistrement à rejouer")
        return 2
    identiques = True
    for enregistrement in enregistrements:
        try:
            resultat = rejouer(enregistrement)
        except ValueError as e:
            print(f"❌ {enregistrement.get('identifiant')} : {e}", file=sys.stderr)
            return 2
        if resultat == IDENTIQUE:
            print(f"{enregistrement['identifiant']} : {IDENTIQUE}")
        else:
            identiques = False
            print(f"{enregistrement['identifiant']} : différent")
            print(resultat)
    return 0 if identiques else 1


def commande_gen_dataset(args: argparse.Namespace) -> int:
    try:
        if args.task == "creative-writing":
            ecrire_instances(generer_instances(args.count, args.seed), args.out)
        else:
            ecrire_jeu_donnees(generer_jeu_donnees(args.count, args.seed,
                                                   solubles_seulement=not args.all), args.out)
    except (IOError, ValueError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    print(f"✅ {args.count} instances écrites dans {args.out}")
    return 0


def creer_parseur() -> argparse.ArgumentParser:
    parseur = argparse.ArgumentParser(
        prog="banc_essai",
        description="Recherche arborescente à température adaptative : expériences et rapports",
    )
    parseur.add_argument("--verbose", "-v", action="store_true", help="Journalisation détaillée")
    sous = parseur.add_subparsers(dest="commande", required=True)

    run = sous.add_parser("run", help="Exécute un lot d'expériences")
    run.add_argument("--task", choices=TACHES)
    run.add_argument("--method", choices=METHODES)
    run.add_argument("--config", help="Fichier JSON de configuration (clé 'preset' acceptée)")
    run.add_argument("--dataset", help="Fichier d'instances")
    run.add_argument("--size", type=int, help="Taille du jeu généré sans --dataset")
    run.add_argument("--seed", type=int)
    run.add_argument("--repeats", type=int)
    run.add_argument("--backend", choices=sorted(BACKENDS_CLI))
    run.add_argument("--policy", help="Politique du modèle simulé (nom ou fichier JSON)")
    run.add_argument("--out", help="Dossier de sortie")
    run.add_argument("--parallel", type=int)
    run.add_argument("--quiet", action="store_true")
    run.set_defaults(fonction=commande_run)

    report = sous.add_parser("report", help="Régénère le rapport depuis les enregistrements")
    report.add_argument("--out", default="resultats", help="Dossier de sortie du rapport")
    report.add_argument("--records", help="Fichier d'enregistrements (défaut : <out>/enregistrements.json)")
    report.add_argument("--instance", help="Instance du tableau de diversité")
    report.add_argument("--task", choices=TACHES, help="Ne garde que les runs de cette tâche")
    report.add_argument("--method", choices=METHODES, help="Ne garde que les runs de cette méthode")
    report.add_argument("--prix-prompt", dest="prix_prompt", type=float, default=TableTarifs.prix_prompt_1k)
    report.add_argument("--prix-generation", dest="prix_generation", type=float,
                        default=TableTarifs.prix_generation_1k)
    report.add_argument("--quiet", action="store_true")
    report.set_defaults(fonction=commande_report)

    oracle = sous.add_parser("oracle", help="Types de solutions d'une instance du jeu de 24")
    oracle.add_argument("nombres", nargs="*", type=int)
    oracle.add_argument("--dataset")
    oracle.set_defaults(fonction=commande_oracle)

    verify = sous.add_parser("verify", help="Vérifie une expression pour une instance")
    verify.add_argument("expression")
    verify.add_argument("nombres", nargs=4, type=int)
    verify.set_defaults(fonction=commande_verify)

    replay = sous.add_parser("replay", help="Rejoue des enregistrements sur le modèle simulé")
    replay.add_argument("records", help="Fichier d'enregistrements")
    replay.add_argument("--id", help="Identifiant d'un seul enregistrement")
    replay.set_defaults(fonction=commande_replay)

    gen = sous.add_parser("gen-dataset", help="Génère un jeu d'instances")
    gen.add_argument("--task", choices=TACHES, default="game24")
    gen.add_argument("--count", type=int, default=50)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--all", action="store_true", help="Garde aussi les instances insolubles")
    gen.add_argument("--out", required=True)
    gen.set_defaults(fonction=commande_gen_dataset)
    return parseur


def main(argv: Optional[List[str]] = None) -> int:
    args = creer_parseur().parse_args(argv)
    configurer_journalisation(args.verbose)
    return args.fonction(args)


if __name__ == "__main__":
    sys.exit(main())
