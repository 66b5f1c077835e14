"""
Module rapports.py
Construit les tableaux de résultats à partir des enregistrements de runs :
taux de succès, diversité des solutions, scores de cohérence, coûts et
compteurs de replis. Chaque chiffre est recalculé depuis les transcriptions.
"""

import csv
import json
import logging
import statistics
from pathlib import Path
from typing import Any, Dict, List, Optional

from ecriture_creative import analyser_score
from jeu24 import canonicaliser_texte, verifier_texte
from modeles import TableTarifs, cout, formater_kilo

logger = logging.getLogger(__name__)

ORDRE_METHODES = ("io", "cot", "tot", "tot-random", "t2ot")

NOTES_REFERENCE = [
    "Taux de succès ToT de référence : 74 % (un chiffre de 72 % est aussi cité pour le même protocole).",
    "Les coûts IO/CoT de référence sont identiques pour les deux tâches malgré des tokens différents ; "
    "les coûts de ce rapport sont toujours recalculés à partir des tokens et des tarifs.",
]


def _ordonner(methodes) -> List[str]:
    return sorted(methodes, key=lambda m: (ORDRE_METHODES.index(m) if m in ORDRE_METHODES else len(ORDRE_METHODES), m))


def _grouper(enregistrements: List[Dict[str, Any]], cle: str) -> Dict[str, List[Dict[str, Any]]]:
    groupes: Dict[str, List[Dict[str, Any]]] = {}
    for enregistrement in enregistrements:
        groupes.setdefault(enregistrement.get(cle, "inconnu"), []).append(enregistrement)
    return groupes


def formater_pourcentage(taux: float) -> str:
    return f"{taux * 100:.1f}%"


def formater_frequences(frequences: List[float]) -> str:
    """(0.5, 0.3, 0.2)"""
    return "(" + ", ".join(str(round(f, 2)) for f in frequences) + ")"


def formater_moyenne_ecart(moyenne: float, ecart: float) -> str:
    return f"{moyenne:.2f} ± {ecart:.2f}"


def reponse_game24(enregistrement: Dict[str, Any]) -> Optional[str]:
    return enregistrement.get("transcription", {}).get("reponse")


def est_verifie(enregistrement: Dict[str, Any]) -> bool:
    """Vérifie la réponse finale à partir de la transcription, sans lire le verdict stocké"""
    origine = enregistrement.get("entree", {}).get("origine", [])
    return verifier_texte(reponse_game24(enregistrement), origine)


ETAPES_JUGEES = ("passage", "reference")


def score_coherence(enregistrement: Dict[str, Any]) -> Optional[int]:
    """
    Score du jugement final de l'arbre retenu, relu depuis la sortie brute du juge

    Seuls le jugement d'une étape de passage et celui d'une référence IO/CoT
    comptent ; un run incomplet n'a pas de score.
    """
    transcription = enregistrement.get("transcription", {})
    arbres = transcription.get("arbres", [])
    if not arbres or transcription.get("complet") is False:
        return None
    arbre = arbres[transcription.get("arbre_choisi", 0)]
    for etape in reversed(arbre.get("etapes", [])):
        if etape.get("type") not in ETAPES_JUGEES or etape.get("avorte"):
            continue
        for appel in reversed(etape.get("appels", [])):
            if appel.get("phase") == "judge" and appel.get("sorties"):
                return analyser_score(appel["sorties"][0]).valeur
    return None


class GenerateurRapports:
    """Calcule les tableaux de résultats à partir des enregistrements"""

    def __init__(self, tarifs: Optional[TableTarifs] = None):
        self.tarifs = tarifs or TableTarifs()

    def rapport_succes(self, enregistrements: List[Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
        """
        Fraction de runs dont l'expression finale se vérifie, par méthode

        Args:
            enregistrements: Enregistrements du jeu de 24

        Returns:
            {methode: {runs, verifies, taux, affichage}}
        """
        tableau = {}
        groupes = _grouper([e for e in enregistrements if e.get("tache") == "game24"], "methode")
        for methode in _ordonner(groupes):
            runs = groupes[methode]
            verifies = sum(1 for e in runs if est_verifie(e))
            taux = verifies / len(runs)
            tableau[methode] = {"runs": len(runs), "verifies": verifies, "taux": taux,
                                "affichage": formater_pourcentage(taux)}
        return tableau

    def rapport_diversite(self, enregistrements: List[Dict[str, Any]], instance: str) -> Dict[str, Dict[str, Any]]:
        """
        Fréquences des types de solutions sur une instance, par méthode

        Le dénominateur est le nombre de runs ; les runs sans solution vérifiée
        sont exclus du numérateur et comptés à part.

        Returns:
            {methode: {runs, echecs, frequences, types, affichage}}
        """
        tableau = {}
        concernes = [e for e in enregistrements if e.get("tache") == "game24" and e.get("instance") == instance]
        groupes = _grouper(concernes, "methode")
        for methode in _ordonner(groupes):
            runs = groupes[methode]
            comptes: Dict[str, int] = {}
            representants: Dict[str, str] = {}
            for enregistrement in runs:
                if not est_verifie(enregistrement):
                    continue
                reponse = reponse_game24(enregistrement)
                cle = canonicaliser_texte(reponse)
                comptes[cle] = comptes.get(cle, 0) + 1
                representants.setdefault(cle, reponse)
            types = sorted(comptes.items(), key=lambda item: (-item[1], item[0]))
            frequences = [nombre / len(runs) for _, nombre in types]
            tableau[methode] = {
                "runs": len(runs),
                "echecs": len(runs) - sum(comptes.values()),
                "frequences": frequences,
                "types": [{"forme": cle, "nombre": nombre, "exemple": representants[cle]} for cle, nombre in types],
                "affichage": formater_frequences(frequences),
            }
        return tableau

    def rapport_scores(self, enregistrements: List[Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
        """
        Moyenne et écart-type (échantillon) des scores de cohérence, par méthode

        Un seul score donne un écart-type de 0, signalé par 'ecart_degenere'.
        """
        tableau = {}
        groupes = _grouper([e for e in enregistrements if e.get("tache") == "creative-writing"], "methode")
        for methode in _ordonner(groupes):
            scores = [s for s in (score_coherence(e) for e in groupes[methode]) if s is not None]
            if not scores:
                continue
            moyenne = statistics.mean(scores)
            degenere = len(scores) < 2
            ecart = 0.0 if degenere else statistics.stdev(scores)
            tableau[methode] = {
                "runs": len(groupes[methode]),
                "scores": len(scores),
                "moyenne": moyenne,
                "ecart_type": ecart,
                "ecart_degenere": degenere,
                "affichage": formater_moyenne_ecart(moyenne, ecart),
            }
        return tableau

    def rapport_cout(self, enregistrements: List[Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
        """
        Tokens moyens par cas (génération / prompt) et coût recalculé, par tâche et méthode

        Returns:
            {"tache/methode": {cas, generation, prompt, cout, affichage, estimes, coherent}}
        """
        tableau = {}
        for tache, par_tache in sorted(_grouper(enregistrements, "tache").items()):
            groupes = _grouper(par_tache, "methode")
            for methode in _ordonner(groupes):
                runs = groupes[methode]
                totaux = [e.get("usage", {}).get("total", {}) for e in runs]
                prompt = statistics.mean(t.get("prompt", 0) for t in totaux)
                generation = statistics.mean(t.get("generation", 0) for t in totaux)
                tableau[f"{tache}/{methode}"] = {
                    "cas": len(runs),
                    "generation": generation,
                    "prompt": prompt,
                    "cout": cout(prompt, generation, self.tarifs),
                    "affichage": f"{formater_kilo(generation)} / {formater_kilo(prompt)}",
                    "estimes": sum(t.get("appels_estimes", 0) for t in totaux),
                    "coherent": all(registre_coherent(e.get("usage", {})) for e in runs),
                }
        return tableau

    def compteurs(self, enregistrements: List[Dict[str, Any]]) -> Dict[str, int]:
        """Replis, rejets et runs incomplets, additionnés sur tous les enregistrements"""
        total: Dict[str, int] = {"runs": len(enregistrements), "runs_incomplets": 0}
        for enregistrement in enregistrements:
            transcription = enregistrement.get("transcription", {})
            if not transcription.get("complet", True):
                total["runs_incomplets"] += 1
            for cle, valeur in transcription.get("compteurs", {}).items():
                total[cle] = total.get(cle, 0) + valeur
        return dict(sorted(total.items()))

    def generer(self, enregistrements: List[Dict[str, Any]],
                instance_diversite: Optional[str] = None) -> Dict[str, Any]:
        """
        Construit le bundle complet

        Args:
            enregistrements: Enregistrements à résumer
            instance_diversite: Instance du tableau de diversité ; par défaut, toutes
                les instances du jeu de 24 jouées plusieurs fois par une même méthode

        Returns:
            Dictionnaire {succes, diversite, scores, cout, compteurs, notes, tarifs}
        """
        if instance_diversite is not None:
            instances = [instance_diversite]
        else:
            repetees = set()
            for (instance, methode), nombre in _compter_paires(enregistrements).items():
                if nombre > 1:
                    repetees.add(instance)
            instances = sorted(repetees)
        return {
            "succes": self.rapport_succes(enregistrements),
            "diversite": {instance: self.rapport_diversite(enregistrements, instance) for instance in instances},
            "scores": self.rapport_scores(enregistrements),
            "cout": self.rapport_cout(enregistrements),
            "compteurs": self.compteurs(enregistrements),
            "notes": list(NOTES_REFERENCE),
            "tarifs": self.tarifs.to_dict(),
        }

    def afficher_rapport(self, bundle: Dict[str, Any]) -> None:
        """Affiche un rapport formaté"""
        print("\n" + "=" * 70)
        print("📊 RAPPORT D'EXPÉRIENCE")
        print("=" * 70)
        print(rendre_texte(bundle))
        print("=" * 70 + "\n")

    def __repr__(self) -> str:
        return f"GenerateurRapports(tarifs={self.tarifs})"


def _compter_paires(enregistrements: List[Dict[str, Any]]) -> Dict[tuple, int]:
    paires: Dict[tuple, int] = {}
    for e in enregistrements:
        if e.get("tache") == "game24":
            cle = (e.get("instance"), e.get("methode"))
            paires[cle] = paires.get(cle, 0) + 1
    return paires


def registre_coherent(usage: Dict[str, Any]) -> bool:
    """Le total d'un registre est la somme de ses phases"""
    total = usage.get("total", {})
    for cle in ("prompt", "generation"):
        if sum(phase.get(cle, 0) for phase in usage.get("par_phase", {}).values()) != total.get(cle, 0):
            return False
    return True


def rendre_texte(bundle: Dict[str, Any]) -> str:
    """Tableaux alignés en texte brut"""
    lignes = []
    if bundle.get("succes"):
        lignes.append("\n🎯 Jeu de 24 : taux de succès")
        for methode, ligne in bundle["succes"].items():
            lignes.append(f"  • {methode:<12} : {ligne['affichage']:>7}  ({ligne['verifies']}/{ligne['runs']})")
    for instance, tableau in bundle.get("diversite", {}).items():
        lignes.append(f"\n🔀 Diversité des solutions ({instance})")
        for methode, ligne in tableau.items():
            lignes.append(f"  • {methode:<12} : {ligne['affichage']}  échecs={ligne['echecs']}/{ligne['runs']}")
    if bundle.get("scores"):
        lignes.append("\n✍️  Écriture créative : score (moyenne ± écart-type)")
        for methode, ligne in bundle["scores"].items():
            drapeau = "  (un seul score)" if ligne["ecart_degenere"] else ""
            lignes.append(f"  • {methode:<12} : {ligne['affichage']}{drapeau}")
    if bundle.get("cout"):
        lignes.append("\n💰 Coût par cas (tokens génération / prompt)")
        for cle, ligne in bundle["cout"].items():
            lignes.append(f"  • {cle:<30} : {ligne['affichage']:>15}  coût={ligne['cout']:.2f}")
    lignes.append("\n⚠️  Compteurs")
    for cle, valeur in bundle.get("compteurs", {}).items():
        lignes.append(f"  • {cle:<40} : {valeur}")
    if bundle.get("notes"):
        lignes.append("\n📝 Notes")
        lignes.extend(f"  • {note}" for note in bundle["notes"])
    return "\n".join(lignes) + "\n"


def _ecrire_csv(chemin: Path, colonnes: List[str], lignes: List[Dict[str, Any]]) -> None:
    try:
        with open(chemin, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=colonnes)
            writer.writeheader()
            writer.writerows(lignes)
    except IOError as e:
        raise IOError(f"Erreur lors de l'export CSV : {e}")


def ecrire_rapport(bundle: Dict[str, Any], dossier: str) -> List[Path]:
    """
    Écrit rapport.json, rapport.txt et un CSV par tableau non vide

    Returns:
        Chemins des fichiers écrits
    """
    racine = Path(dossier)
    racine.mkdir(parents=True, exist_ok=True)
    ecrits = []
    chemin_json = racine / "rapport.json"
    chemin_json.write_text(json.dumps(bundle, sort_keys=True, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    chemin_txt = racine / "rapport.txt"
    chemin_txt.write_text(rendre_texte(bundle), encoding="utf-8")
    ecrits.extend([chemin_json, chemin_txt])

    if bundle.get("succes"):
        chemin = racine / "succes.csv"
        _ecrire_csv(chemin, ["methode", "runs", "verifies", "taux", "affichage"],
                    [{"methode": m, **ligne} for m, ligne in bundle["succes"].items()])
        ecrits.append(chemin)
    if bundle.get("diversite"):
        chemin = racine / "diversite.csv"
        _ecrire_csv(chemin, ["instance", "methode", "runs", "echecs", "affichage"],
                    [{"instance": instance, "methode": m, "runs": ligne["runs"], "echecs": ligne["echecs"],
                      "affichage": ligne["affichage"]}
                     for instance, tableau in bundle["diversite"].items() for m, ligne in tableau.items()])
        ecrits.append(chemin)
    if bundle.get("scores"):
        chemin = racine / "scores.csv"
        _ecrire_csv(chemin, ["methode", "runs", "scores", "moyenne", "ecart_type", "ecart_degenere", "affichage"],
                    [{"methode": m, **ligne} for m, ligne in bundle["scores"].items()])
        ecrits.append(chemin)
    if bundle.get("cout"):
        chemin = racine / "cout.csv"
        _ecrire_csv(chemin, ["cle", "cas", "generation", "prompt", "cout", "affichage", "estimes", "coherent"],
                    [{"cle": cle, **ligne} for cle, ligne in bundle["cout"].items()])
        ecrits.append(chemin)
    logger.info("Rapport écrit dans %s", racine)
    return ecrits
