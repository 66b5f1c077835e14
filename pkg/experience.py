"""
Module experience.py
Intégration complète : jeu de données → runs (recherche ou référence)
→ enregistrements → rapport. Contient aussi la relecture d'un enregistrement.
"""

import difflib
import hashlib
import json
import logging
import time
from dataclasses import dataclass, field, replace
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from arbre import METHODES, ConfigRecherche, ResultatRecherche
from base_donnees import BaseEnregistrements, serialiser
from controleur_temperature import ParametresPSO
from ecriture_creative import (
    ConfigEcriture,
    EcritureCreative,
    InstanceEcriture,
    charger_instances,
    generer_instances,
    noter_coherence,
    politique_ecriture_defaut,
    valider_passage,
)
from jeu24 import (
    Jeu24,
    charger_jeu_donnees,
    generer_jeu_donnees,
    politique_resolution,
    politique_trois_chemins,
    verifier_texte,
)
from modeles import (
    Backend,
    ClientHTTP,
    ErreurBackend,
    ModeleSimule,
    PolitiqueScriptee,
    RegistreUsage,
    TableTarifs,
    charger_politique,
    deriver_graine,
)
from rapports import GenerateurRapports, ecrire_rapport, score_coherence
from recherche import DefinitionTache, executer_baseline, executer_en_parallele, executer_essaim

logger = logging.getLogger(__name__)

TACHES = ("game24", "creative-writing")
TYPES_BACKEND = ("simule", "http")
IDENTIQUE = "identical"

POLITIQUES = {
    "jeu24-resolution": politique_resolution,
    "jeu24-trois-chemins": politique_trois_chemins,
    "ecriture-defaut": politique_ecriture_defaut,
}
POLITIQUE_DEFAUT = {"game24": "jeu24-resolution", "creative-writing": "ecriture-defaut"}

PRESETS: Dict[str, Dict[str, Any]] = {
    "game24-t2ot": {
        "tache": "game24",
        "methode": "t2ot",
        "pso": {"poids_inertie": 1.0, "acceleration_personnelle": 0.1, "acceleration_globale": 0.1,
                "temperature_initiale": 0.7},
        "recherche": {"profondeur_max": 3, "largeur_faisceau": 5, "echantillons_valeur": 3, "nombre_arbres": 1},
    },
    "cw-t2ot": {
        "tache": "creative-writing",
        "methode": "t2ot",
        "pso": {"poids_inertie": 1.0, "acceleration_personnelle": -0.005, "acceleration_globale": -0.005,
                "temperature_initiale": 0.7, "meilleur_initial": 50.0},
        "recherche": {"profondeur_max": 2, "nombre_arbres": 1},
        "ecriture": {"plans": 5, "votes": 5},
    },
}


@dataclass
class ConfigBackend:
    """Choix du modèle : simulé (politique scriptée) ou HTTP"""

    type: str = "simule"
    politique: Optional[str] = None
    url_base: str = "https://api.openai.com/v1"
    modele: str = "gpt-4"
    variable_cle: str = "OPENAI_API_KEY"
    delai: float = 60.0
    tentatives: int = 3

    def __post_init__(self):
        if self.type not in TYPES_BACKEND:
            raise ValueError(f"Backend inconnu : {self.type}. Valides: {TYPES_BACKEND}")
        if self.tentatives < 1:
            raise ValueError(f"tentatives doit être ≥ 1 (reçu {self.tentatives})")

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


@dataclass
class ConfigExperience:
    """Configuration complète d'un lot de runs"""

    tache: str = "game24"
    methode: str = "t2ot"
    pso: ParametresPSO = field(default_factory=ParametresPSO)
    recherche: ConfigRecherche = field(default_factory=ConfigRecherche)
    ecriture: ConfigEcriture = field(default_factory=ConfigEcriture)
    backend: ConfigBackend = field(default_factory=ConfigBackend)
    tarifs: TableTarifs = field(default_factory=TableTarifs)
    jeu_donnees: Optional[str] = None
    taille_jeu_donnees: int = 50
    repetitions: int = 1
    graine: int = 0
    sortie: str = "resultats"
    plage_aleatoire: Tuple[float, float] = (0.0, 1.0)
    temperature_baseline: Optional[float] = None
    parallelisme: int = 1

    def __post_init__(self):
        if self.tache not in TACHES:
            raise ValueError(f"Tâche inconnue : {self.tache}. Valides: {TACHES}")
        if self.methode not in METHODES:
            raise ValueError(f"Méthode inconnue : {self.methode}. Valides: {METHODES}")
        for nom in ("taille_jeu_donnees", "repetitions", "parallelisme"):
            if getattr(self, nom) < 1:
                raise ValueError(f"{nom} doit être ≥ 1 (reçu {getattr(self, nom)})")
        self.plage_aleatoire = tuple(float(v) for v in self.plage_aleatoire)
        basse, haute = self.plage_aleatoire
        if not 0.0 <= basse < haute:
            raise ValueError(f"plage_aleatoire invalide : ({basse}, {haute})")
        if self.temperature_baseline is not None and self.temperature_baseline < 0:
            raise ValueError(f"temperature_baseline doit être ≥ 0 (reçu {self.temperature_baseline})")
        # La méthode de la recherche suit toujours celle de l'expérience
        if self.recherche.methode != self.methode:
            self.recherche = replace(self.recherche, methode=self.methode)

    @property
    def temperature_reference(self) -> float:
        """Température des références IO/CoT"""
        if self.temperature_baseline is not None:
            return self.temperature_baseline
        return self.pso.temperature_initiale

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tache": self.tache,
            "methode": self.methode,
            "pso": self.pso.to_dict(),
            "recherche": self.recherche.to_dict(),
            "ecriture": self.ecriture.to_dict(),
            "backend": self.backend.to_dict(),
            "tarifs": self.tarifs.to_dict(),
            "jeu_donnees": self.jeu_donnees,
            "taille_jeu_donnees": self.taille_jeu_donnees,
            "repetitions": self.repetitions,
            "graine": self.graine,
            "sortie": self.sortie,
            "plage_aleatoire": list(self.plage_aleatoire),
            "temperature_baseline": self.temperature_baseline,
            "parallelisme": self.parallelisme,
        }

    @classmethod
    def depuis_dict(cls, donnees: Dict[str, Any]) -> "ConfigExperience":
        """
        Construit la configuration depuis un dictionnaire (fichier JSON)

        Raises:
            ValueError: Si une clé est inconnue ou une valeur invalide
        """
        donnees = dict(donnees)
        imbriques = {
            "pso": ParametresPSO.depuis_dict,
            "recherche": ConfigRecherche.depuis_dict,
            "ecriture": ConfigEcriture.depuis_dict,
            "backend": lambda d: ConfigBackend(**d),
            "tarifs": lambda d: TableTarifs(**d),
        }
        try:
            for cle, fabrique in imbriques.items():
                if cle in donnees:
                    donnees[cle] = fabrique(donnees[cle])
            return cls(**donnees)
        except TypeError as e:
            raise ValueError(f"Configuration invalide : {e}")


def fusionner(base: Dict[str, Any], surcharge: Dict[str, Any]) -> Dict[str, Any]:
    """Fusion récursive : les valeurs de surcharge gagnent"""
    resultat = dict(base)
    for cle, valeur in surcharge.items():
        if isinstance(valeur, dict) and isinstance(resultat.get(cle), dict):
            resultat[cle] = fusionner(resultat[cle], valeur)
        else:
            resultat[cle] = valeur
    return resultat


def config_preset(nom: str, **surcharges: Any) -> ConfigExperience:
    """
    Configuration d'un preset, éventuellement surchargée

    Raises:
        ValueError: Si le preset est inconnu
    """
    if nom not in PRESETS:
        raise ValueError(f"Preset inconnu : {nom}. Valides: {sorted(PRESETS)}")
    return ConfigExperience.depuis_dict(fusionner(PRESETS[nom], surcharges))


def charger_config(chemin: str) -> ConfigExperience:
    """
    Charge une configuration JSON ; une clé "preset" sert de base

    Raises:
        IOError: Si le fichier est illisible
        ValueError: Si la configuration est invalide
    """
    try:
        with open(chemin, "r", encoding="utf-8") as f:
            donnees = json.load(f)
    except (IOError, json.JSONDecodeError) as e:
        raise IOError(f"Erreur lors de la lecture de la configuration : {e}")
    preset = donnees.pop("preset", None)
    if preset is not None:
        if preset not in PRESETS:
            raise ValueError(f"Preset inconnu : {preset}. Valides: {sorted(PRESETS)}")
        donnees = fusionner(PRESETS[preset], donnees)
    return ConfigExperience.depuis_dict(donnees)


def empreinte_config(config: Dict[str, Any]) -> str:
    """SHA-256 du JSON canonique de la configuration"""
    return hashlib.sha256(serialiser(config).encode("utf-8")).hexdigest()


def construire_politique(nom: Optional[str], tache: str) -> PolitiqueScriptee:
    """
    Politique nommée ou fichier JSON de règles

    Raises:
        ValueError: Si le nom n'est ni une politique connue ni un fichier existant
    """
    nom = nom or POLITIQUE_DEFAUT[tache]
    if nom in POLITIQUES:
        return POLITIQUES[nom]()
    if Path(nom).is_file():
        return charger_politique(nom)
    raise ValueError(f"Politique inconnue : {nom}. Valides: {sorted(POLITIQUES)} ou un fichier JSON")


def construire_backend(config: ConfigExperience) -> Backend:
    if config.backend.type == "simule":
        return ModeleSimule(construire_politique(config.backend.politique, config.tache))
    return ClientHTTP(
        url_base=config.backend.url_base,
        modele=config.backend.modele,
        variable_cle=config.backend.variable_cle,
        delai=config.backend.delai,
        tentatives=config.backend.tentatives,
        graine=config.graine,
    )


# ----------------------------------------------------------------------
# Instances
# ----------------------------------------------------------------------

def charger_entrees(config: ConfigExperience) -> List[Tuple[str, Dict[str, Any]]]:
    """
    Liste (clé d'instance, entrée sérialisable) du lot

    Sans fichier, le jeu est généré à partir de la graine.

    Raises:
        IOError, ValueError: Jeu de données illisible ou mal formé
    """
    if config.tache == "game24":
        if config.jeu_donnees:
            instances = charger_jeu_donnees(config.jeu_donnees)
        else:
            instances = generer_jeu_donnees(config.taille_jeu_donnees, config.graine)
        return [(" ".join(map(str, origine)), {"origine": list(origine)}) for origine in instances]
    if config.jeu_donnees:
        textes = charger_instances(config.jeu_donnees)
    else:
        textes = generer_instances(config.taille_jeu_donnees, config.graine)
    return [(instance.identifiant, instance.to_dict()) for instance in textes]


def definir_tache(config: ConfigExperience, entree: Dict[str, Any]) -> DefinitionTache:
    if config.tache == "game24":
        return Jeu24(entree["origine"])
    instance = InstanceEcriture(entree["identifiant"], tuple(entree["phrases"]))
    return EcritureCreative(instance, config.ecriture)


def graine_run(config: ConfigExperience, indice_instance: int, repetition: int) -> int:
    """Graine propre à un run, stable quel que soit l'ordre d'exécution"""
    return deriver_graine(config.graine, "run", indice_instance, repetition) % (2 ** 31)


# ----------------------------------------------------------------------
# Runs
# ----------------------------------------------------------------------

def _juger_reference(resultat: ResultatRecherche, tache: EcritureCreative, backend: Backend,
                     config: ConfigRecherche, registre: RegistreUsage) -> None:
    """Ajoute le jugement du passage d'une référence IO/CoT à sa transcription"""
    arbre = resultat.arbres[0]
    if resultat.reponse is None:
        arbre["score"] = None
        return
    try:
        score, appel = noter_coherence(resultat.reponse, backend, config.temperature_evaluation, config.graine,
                                       tache.config.corps_juge, registre)
    except ErreurBackend as e:
        logger.warning("Jugement de la référence interrompu : %s", e)
        arbre.update(avorte=True, erreur=str(e), score=None)
        resultat.complet = False
        resultat.erreurs.append(str(e))
        return
    etape = arbre["etapes"][0]
    etape["appels"].append(appel)
    etape["type"] = "reference"
    arbre["score"] = score.valeur
    if score.repli:
        resultat.compteurs["juge_repli"] = resultat.compteurs.get("juge_repli", 0) + 1
    if score.borne:
        resultat.compteurs["juge_borne"] = resultat.compteurs.get("juge_borne", 0) + 1
    arbre["compteurs"] = dict(resultat.compteurs)


def verdict(config: ConfigExperience, entree: Dict[str, Any], transcription: Dict[str, Any]) -> Dict[str, Any]:
    """Réponse finale, vérification et score recalculés depuis la transcription"""
    reponse = transcription.get("reponse")
    if config.tache == "game24":
        return {"reponse": reponse, "verifie": verifier_texte(reponse, entree["origine"]),
                "score": None, "conforme": None}
    instance = InstanceEcriture(entree["identifiant"], tuple(entree["phrases"]))
    conforme = bool(reponse) and valider_passage(reponse, instance)[0]
    return {"reponse": reponse, "verifie": conforme,
            "score": score_coherence({"transcription": transcription}), "conforme": conforme}


def executer_run(config: ConfigExperience, backend: Backend, indice_instance: int, cle: str,
                 entree: Dict[str, Any], repetition: int) -> Dict[str, Any]:
    """
    Exécute un run et construit son enregistrement

    Une erreur du backend n'interrompt pas le lot : le run est marqué incomplet.
    """
    debut = time.perf_counter()
    horodatage = datetime.now().isoformat()
    graine = graine_run(config, indice_instance, repetition)
    recherche = replace(config.recherche, graine=graine)
    tache = definir_tache(config, entree)
    registre = RegistreUsage()

    if config.methode in ("io", "cot"):
        resultat = executer_baseline(tache, backend, recherche, config.temperature_reference,
                                     config.methode, registre)
        if isinstance(tache, EcritureCreative) and resultat.complet:
            _juger_reference(resultat, tache, backend, recherche, registre)
        resultat.usage = registre.to_dict()
    else:
        resultat = executer_essaim(tache, backend, config.pso, recherche, config.plage_aleatoire, registre)

    transcription = resultat.to_dict()
    snapshot = config.to_dict()
    if not resultat.complet:
        logger.warning("Run %s/%s r%d incomplet : %s", config.methode, cle, repetition, resultat.erreurs)
    return {
        "identifiant": f"{config.tache}-{config.methode}-i{indice_instance:03d}-r{repetition:02d}",
        "tache": config.tache,
        "methode": config.methode,
        "instance": cle,
        "indice_instance": indice_instance,
        "repetition": repetition,
        "graine": graine,
        "config": snapshot,
        "empreinte_config": empreinte_config(snapshot),
        "entree": entree,
        "transcription": transcription,
        "verdict": verdict(config, entree, transcription),
        "usage": registre.to_dict(),
        "complet": resultat.complet,
        "temps": {"debut": horodatage, "duree": round(time.perf_counter() - debut, 6)},
    }


def executer_experience(config: ConfigExperience, afficher: bool = True,
                        backend: Optional[Backend] = None) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
    """
    Exécute tous les runs (instance × répétition), stocke les enregistrements
    et écrit le rapport dans config.sortie

    Le dossier de sortie ne contient que le dernier lot : un lot précédent
    y est remplacé et le rapport ne porte que sur les runs de ce lot.

    Args:
        config: Configuration validée
        afficher: Affiche la progression et le rapport
        backend: Modèle à utiliser (sinon construit depuis la configuration)

    Returns:
        (enregistrements triés par identifiant, bundle du rapport)

    Raises:
        IOError, ValueError: Jeu de données illisible, avant tout appel au modèle
    """
    entrees = charger_entrees(config)
    proprietaire = backend is None
    backend = backend if backend is not None else construire_backend(config)
    runs = [(indice, cle, entree, repetition)
            for indice, (cle, entree) in enumerate(entrees)
            for repetition in range(config.repetitions)]

    if afficher:
        print("\n" + "=" * 70)
        print(f"🔄 EXPÉRIENCE - {config.tache} / {config.methode}")
        print("=" * 70)
        print(f"\n✓ {len(entrees)} instances × {config.repetitions} répétitions = {len(runs)} runs")

    try:
        enregistrements = executer_en_parallele(
            lambda run: executer_run(config, backend, *run), runs, config.parallelisme)
    finally:
        if proprietaire and isinstance(backend, ClientHTTP):
            backend.fermer()
    enregistrements.sort(key=lambda e: e["identifiant"])

    sortie = Path(config.sortie)
    base = BaseEnregistrements(str(sortie / "enregistrements.json"))
    anciens = base.compter()
    if anciens:
        logger.warning("%s contenait %d enregistrements d'un lot précédent : remplacés",
                       base.chemin_fichier, anciens)
        base.supprimer_tous()
    base.inserer_multiple(enregistrements)
    base.exporter_csv(str(sortie / "enregistrements.csv"))
    generateur = GenerateurRapports(config.tarifs)
    bundle = generateur.generer(enregistrements)
    ecrire_rapport(bundle, str(sortie))

    if afficher:
        stats = base.statistiques()
        print(f"✓ Stockage dans la base ({stats['count']} enregistrements, {stats['complets']} complets, "
              f"{stats['verifies']} vérifiés)")
        generateur.afficher_rapport(bundle)
    return enregistrements, bundle


# ----------------------------------------------------------------------
# Relecture
# ----------------------------------------------------------------------

def sans_temps(enregistrement: Dict[str, Any]) -> Dict[str, Any]:
    return {cle: valeur for cle, valeur in enregistrement.items() if cle != "temps"}


def rejouer(enregistrement: Dict[str, Any], backend: Optional[Backend] = None) -> str:
    """
    Ré-exécute un enregistrement sur le modèle simulé et compare

    Returns:
        "identical" ou le diff unifié des deux sérialisations

    Raises:
        ValueError: Empreinte de configuration incohérente ou backend non simulé
    """
    snapshot = enregistrement["config"]
    if empreinte_config(snapshot) != enregistrement.get("empreinte_config"):
        raise ValueError(f"Empreinte de configuration incohérente pour {enregistrement.get('identifiant')}")
    config = ConfigExperience.depuis_dict(snapshot)
    if backend is None:
        if config.backend.type != "simule":
            raise ValueError("La relecture n'est possible que sur le modèle simulé")
        backend = construire_backend(config)
    nouveau = executer_run(config, backend, enregistrement["indice_instance"], enregistrement["instance"],
                           enregistrement["entree"], enregistrement["repetition"])
    attendu = serialiser(sans_temps(enregistrement))
    obtenu = serialiser(sans_temps(nouveau))
    if attendu == obtenu:
        return IDENTIQUE
    return "".join(difflib.unified_diff(attendu.splitlines(keepends=True), obtenu.splitlines(keepends=True),
                                        fromfile="enregistre", tofile="rejoue"))
