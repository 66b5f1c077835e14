"""
Module arbre.py
Types de base de la recherche arborescente : pensées (noeuds), configuration
de recherche, résultat d'un run et comptabilité commune à chaque arbre.
"""

import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional

from controleur_temperature import (
    ControleurTemperature,
    EtatTemperature,
    mettre_a_jour_meilleur_personnel,
)
from modeles import RegistreUsage

logger = logging.getLogger(__name__)

METHODES = ("io", "cot", "tot", "tot-random", "t2ot")
AGREGATIONS = ("max", "mean")


@dataclass
class NoeudPensee:
    """Une pensée : solution partielle produite par le modèle"""

    identifiant: int
    parent: Optional[int]
    profondeur: int
    contenu: str
    temperature_utilisee: float
    valeur: Optional[float] = None
    echantillons_valeur: List[str] = field(default_factory=list)
    etat: Any = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.profondeur < 0:
            raise ValueError(f"Profondeur négative : {self.profondeur}")
        if (self.parent is None) != (self.profondeur == 0):
            raise ValueError("Seule la racine (profondeur 0) n'a pas de parent")

    def to_dict(self) -> Dict[str, Any]:
        """Convertit le noeud en dictionnaire (sans l'état interne de la tâche)"""
        return {
            "id": self.identifiant,
            "parent": self.parent,
            "profondeur": self.profondeur,
            "contenu": self.contenu,
            "temperature": self.temperature_utilisee,
            "valeur": self.valeur,
            "echantillons_valeur": list(self.echantillons_valeur),
        }

    def __repr__(self) -> str:
        valeur = "-" if self.valeur is None else f"{self.valeur:.3f}"
        return (f"NoeudPensee(id={self.identifiant}, parent={self.parent}, "
                f"profondeur={self.profondeur}, valeur={valeur}, contenu={self.contenu!r})")


@dataclass
class ConfigRecherche:
    """Paramètres de la recherche en faisceau"""

    profondeur_max: int = 3
    largeur_faisceau: int = 5
    echantillons_valeur: int = 3
    nombre_arbres: int = 1
    methode: str = "t2ot"
    graine: int = 0
    agregation: str = "max"
    propositions_par_noeud: int = 8
    temperature_evaluation: float = 0.7
    parallelisme: int = 1
    echantillons_baseline: int = 1

    def __post_init__(self):
        for nom in ("profondeur_max", "largeur_faisceau", "echantillons_valeur", "nombre_arbres",
                    "propositions_par_noeud", "parallelisme", "echantillons_baseline"):
            if getattr(self, nom) < 1:
                raise ValueError(f"{nom} doit être ≥ 1 (reçu {getattr(self, nom)})")
        if self.methode not in METHODES:
            raise ValueError(f"Méthode inconnue : {self.methode}. Valides: {METHODES}")
        if self.agregation not in AGREGATIONS:
            raise ValueError(f"Agrégation inconnue : {self.agregation}. Valides: {AGREGATIONS}")
        if not 0.0 <= self.temperature_evaluation <= 2.0:
            raise ValueError(f"temperature_evaluation hors de [0, 2] : {self.temperature_evaluation}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def depuis_dict(cls, donnees: Dict[str, Any]) -> "ConfigRecherche":
        return cls(**donnees)


@dataclass
class ResultatRecherche:
    """Transcription complète d'un run (un ou plusieurs arbres)"""

    arbres: List[Dict[str, Any]]
    reponse: Optional[str] = None
    arbre_choisi: int = 0
    noeuds_finaux: List[Dict[str, Any]] = field(default_factory=list)
    complet: bool = True
    erreurs: List[str] = field(default_factory=list)
    compteurs: Dict[str, int] = field(default_factory=dict)
    usage: Dict[str, Any] = field(default_factory=dict)
    barrieres: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def trajectoire(self) -> List[float]:
        """Températures de l'arbre retenu, une par étape exécutée"""
        return list(self.arbres[self.arbre_choisi]["trajectoire"]) if self.arbres else []

    @property
    def faisceaux(self) -> List[List[int]]:
        if not self.arbres:
            return []
        return [etape.get("faisceau", []) for etape in self.arbres[self.arbre_choisi]["etapes"]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "arbres": self.arbres,
            "reponse": self.reponse,
            "arbre_choisi": self.arbre_choisi,
            "noeuds_finaux": self.noeuds_finaux,
            "complet": self.complet,
            "erreurs": list(self.erreurs),
            "compteurs": dict(sorted(self.compteurs.items())),
            "usage": self.usage,
            "barrieres": [dict(barriere) for barriere in self.barrieres],
        }

    @classmethod
    def depuis_dict(cls, donnees: Dict[str, Any]) -> "ResultatRecherche":
        return cls(**donnees)


def fusionner_compteurs(cible: Dict[str, int], source: Dict[str, int]) -> Dict[str, int]:
    """Additionne les compteurs de source dans cible"""
    for cle, valeur in source.items():
        cible[cle] = cible.get(cle, 0) + valeur
    return cible


class Arbre:
    """
    Un arbre de raisonnement et sa température propre

    Les sous-classes implémentent executer_etape ; la clôture d'étape
    (mise à jour de la température puis du meilleur personnel) est commune.
    """

    def __init__(self, index: int, controleur: ControleurTemperature, graine: int,
                 profondeur_max: int, registre: Optional[RegistreUsage] = None):
        """
        Initialise un arbre

        Args:
            index: Position de l'arbre dans l'essaim
            controleur: Contrôleur de température partagé par la méthode
            graine: Graine propre à l'arbre (graine du run + index)
            profondeur_max: Nombre d'étapes de raisonnement
            registre: Comptabilité des tokens du run
        """
        if profondeur_max < 1:
            raise ValueError(f"profondeur_max doit être ≥ 1 (reçu {profondeur_max})")
        self.index = index
        self.controleur = controleur
        self.graine = graine
        self.profondeur_max = profondeur_max
        self.registre = registre if registre is not None else RegistreUsage()
        self.etat_temperature: EtatTemperature = controleur.nouvel_etat()
        self.etapes: List[Dict[str, Any]] = []
        self.trajectoire: List[float] = []
        self.epuise = False
        self.avorte = False
        self.erreur: Optional[str] = None
        self.compteurs: Dict[str, int] = {}

    @property
    def temperature(self) -> float:
        return self.etat_temperature.temperature_courante

    @property
    def meilleur_personnel(self) -> Optional[float]:
        return self.etat_temperature.meilleur_personnel

    def actif(self) -> bool:
        """Vrai si l'arbre doit encore exécuter une étape"""
        return not self.epuise and not self.avorte and len(self.etapes) < self.profondeur_max

    def compter(self, motif: str, nombre: int = 1) -> None:
        if nombre:
            self.compteurs[motif] = self.compteurs.get(motif, 0) + nombre

    def executer_etape(self, meilleur_global: Optional[float]) -> None:
        raise NotImplementedError

    def avorter(self, erreur: Exception, etape: Dict[str, Any]) -> None:
        """Marque l'arbre comme interrompu et conserve l'étape partielle"""
        logger.warning("Arbre %d interrompu à l'étape %d : %s", self.index, len(self.etapes) + 1, erreur)
        self.avorte = True
        self.erreur = str(erreur)
        etape["avorte"] = True
        etape["erreur"] = self.erreur
        self.etapes.append(etape)

    def cloturer_etape(self, x: float, meilleur_global: Optional[float]) -> Dict[str, Any]:
        """
        Termine une étape évaluée à x

        À appeler une fois l'étape ajoutée à self.etapes. La température
        n'est recalculée que si une étape suivante existe ;
        le meilleur personnel intègre x dans tous les cas.

        Args:
            x: Évaluation de l'étape
            meilleur_global: gb issu de la barrière précédente

        Returns:
            Dictionnaire {x, pb, temperature_suivante} pour la transcription
        """
        etape_suivante = len(self.etapes) < self.profondeur_max
        if etape_suivante:
            self.controleur.mettre_a_jour(self.etat_temperature, x, meilleur_global)
        mettre_a_jour_meilleur_personnel(self.etat_temperature, x)
        return {
            "x": x,
            "pb": self.etat_temperature.meilleur_personnel,
            "gb_precedent": meilleur_global,
            "temperature_suivante": self.etat_temperature.temperature_courante if etape_suivante else None,
        }

    def reponse(self) -> Optional[str]:
        return None

    def score_reponse(self) -> float:
        """Score servant à départager les arbres d'un essaim"""
        return float("-inf")

    def noeuds_finaux(self) -> List[Dict[str, Any]]:
        return []

    def to_dict(self) -> Dict[str, Any]:
        """Transcription de l'arbre"""
        return {
            "index": self.index,
            "graine": self.graine,
            "etapes": self.etapes,
            "trajectoire": list(self.trajectoire),
            "historique": [list(entree) for entree in self.etat_temperature.historique],
            "meilleur_personnel": self.etat_temperature.meilleur_personnel,
            "epuise": self.epuise,
            "avorte": self.avorte,
            "erreur": self.erreur,
            "compteurs": dict(sorted(self.compteurs.items())),
            "reponse": self.reponse(),
        }

    def __repr__(self) -> str:
        return (f"{self.__class__.__name__}(index={self.index}, etapes={len(self.etapes)}, "
                f"temperature={self.temperature:.3f}, epuise={self.epuise}, avorte={self.avorte})")
