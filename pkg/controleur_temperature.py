"""
Module controleur_temperature.py
Ajuste la température d'échantillonnage à chaque étape de raisonnement
selon une règle inspirée de l'optimisation par essaim particulaire :
inertie + écart au meilleur personnel + écart au meilleur global.
"""

import logging
import math
from dataclasses import dataclass, field, asdict
from typing import List, Optional, Tuple, Dict, Any

import numpy as np

logger = logging.getLogger(__name__)

# Bornes par défaut de la température (la règle ne fixe pas de valeurs)
TEMPERATURE_MIN_DEFAUT = 0.1
TEMPERATURE_MAX_DEFAUT = 1.0

# (étape, température, x, pb, gb)
EntreeHistorique = Tuple[int, float, float, float, float]


def _verifier_fini(nom: str, valeur: float) -> None:
    if valeur is None or not math.isfinite(valeur):
        raise ValueError(f"Valeur non finie pour {nom} : {valeur}")


@dataclass
class ParametresPSO:
    """Coefficients du contrôleur et bornes de température"""

    poids_inertie: float = 1.0
    acceleration_personnelle: float = 0.1
    acceleration_globale: float = 0.1
    temperature_min: float = TEMPERATURE_MIN_DEFAUT
    temperature_max: float = TEMPERATURE_MAX_DEFAUT
    temperature_initiale: float = 0.7
    meilleur_initial: Optional[float] = None

    def __post_init__(self):
        for nom in ("poids_inertie", "acceleration_personnelle", "acceleration_globale",
                    "temperature_min", "temperature_max", "temperature_initiale"):
            _verifier_fini(nom, getattr(self, nom))
        if self.meilleur_initial is not None:
            _verifier_fini("meilleur_initial", self.meilleur_initial)
        if self.temperature_min < 0:
            raise ValueError(f"temperature_min doit être ≥ 0 (reçu {self.temperature_min})")
        if not self.temperature_min <= self.temperature_initiale <= self.temperature_max:
            raise ValueError(
                f"Il faut temperature_min ≤ temperature_initiale ≤ temperature_max "
                f"({self.temperature_min}, {self.temperature_initiale}, {self.temperature_max})"
            )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def depuis_dict(cls, donnees: Dict[str, Any]) -> "ParametresPSO":
        return cls(**donnees)


@dataclass
class EtatTemperature:
    """Température courante et mémoire du meilleur personnel d'un arbre"""

    temperature_courante: float
    meilleur_personnel: Optional[float] = None
    etape: int = 0
    historique: List[EntreeHistorique] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "temperature_courante": self.temperature_courante,
            "meilleur_personnel": self.meilleur_personnel,
            "etape": self.etape,
            "historique": [list(entree) for entree in self.historique],
        }


@dataclass
class EtatEssaim:
    """Meilleurs personnels de chaque arbre et meilleur global"""

    nombre_arbres: int
    meilleurs_personnels: List[Optional[float]] = field(default_factory=list)
    meilleur_global: Optional[float] = None

    def __post_init__(self):
        if self.nombre_arbres < 1:
            raise ValueError(f"nombre_arbres doit être ≥ 1 (reçu {self.nombre_arbres})")
        if not self.meilleurs_personnels:
            self.meilleurs_personnels = [None] * self.nombre_arbres
        if len(self.meilleurs_personnels) != self.nombre_arbres:
            raise ValueError("Un meilleur personnel par arbre est attendu")


def borner(temperature: float, temperature_min: float, temperature_max: float) -> float:
    """
    Contraint une température dans l'intervalle fermé [min, max]

    Args:
        temperature: Température brute
        temperature_min: Borne inférieure
        temperature_max: Borne supérieure

    Returns:
        La température bornée
    """
    if temperature_min > temperature_max:
        raise ValueError(f"Bornes incohérentes : {temperature_min} > {temperature_max}")
    return min(max(temperature, temperature_min), temperature_max)


def temperature_brute(params: ParametresPSO, temperature: float, pb: float, x: float, gb: float) -> float:
    """Applique la règle de mise à jour, sans bornage"""
    return (params.poids_inertie * temperature
            + params.acceleration_personnelle * (pb - x)
            + params.acceleration_globale * (gb - x))


def references_precedentes(params: ParametresPSO, etat: EtatTemperature, x: float,
                           gb: Optional[float]) -> Tuple[float, float]:
    """pb[n-1] et gb[n-1] effectivement utilisés par la règle"""
    # Avant toute évaluation : a priori configuré, sinon x (termes d'écart nuls)
    defaut = params.meilleur_initial if params.meilleur_initial is not None else x
    pb = etat.meilleur_personnel if etat.meilleur_personnel is not None else defaut
    gb = gb if gb is not None else defaut
    return pb, gb


def mettre_a_jour_temperature(params: ParametresPSO, etat: EtatTemperature,
                              x: float, gb: Optional[float]) -> float:
    """
    Calcule la température de l'étape suivante et l'enregistre dans l'état

    Le meilleur personnel n'est PAS mis à jour ici : la température est
    calculée avec pb[n-1] et gb[n-1], puis l'appelant intègre x dans pb.

    Args:
        params: Coefficients du contrôleur
        etat: État de température de l'arbre
        x: Évaluation de l'étape courante
        gb: Meilleur global de l'étape précédente (None avant la première barrière)

    Returns:
        La nouvelle température, bornée dans [temperature_min, temperature_max]

    Raises:
        ValueError: Si une entrée n'est pas finie
    """
    _verifier_fini("x", x)
    _verifier_fini("temperature_courante", etat.temperature_courante)
    if gb is not None:
        _verifier_fini("gb", gb)
    pb_prec, gb_prec = references_precedentes(params, etat, x, gb)
    nouvelle = borner(temperature_brute(params, etat.temperature_courante, pb_prec, x, gb_prec),
                      params.temperature_min, params.temperature_max)
    _enregistrer(etat, nouvelle, x, pb_prec, gb_prec)
    return nouvelle


def _enregistrer(etat: EtatTemperature, temperature: float, x: float, pb: float, gb: float) -> None:
    etat.etape += 1
    etat.historique.append((etat.etape, temperature, x, pb, gb))
    etat.temperature_courante = temperature


def mettre_a_jour_meilleur_personnel(etat: EtatTemperature, x: float) -> EtatTemperature:
    """
    Intègre une évaluation dans le meilleur personnel (maximum)

    Args:
        etat: État de température de l'arbre
        x: Évaluation observée

    Returns:
        L'état mis à jour
    """
    _verifier_fini("x", x)
    if etat.meilleur_personnel is None or x > etat.meilleur_personnel:
        etat.meilleur_personnel = x
    return etat


def mettre_a_jour_meilleur_global(essaim: EtatEssaim) -> EtatEssaim:
    """
    Recalcule le meilleur global comme maximum des meilleurs personnels

    Args:
        essaim: État de l'essaim

    Returns:
        L'essaim mis à jour (le meilleur global ne décroît jamais)
    """
    connus = [pb for pb in essaim.meilleurs_personnels if pb is not None]
    if not connus:
        return essaim
    candidat = max(connus)
    if essaim.meilleur_global is None or candidat > essaim.meilleur_global:
        essaim.meilleur_global = candidat
    return essaim


class ControleurTemperature:
    """Base commune : état par arbre, historique, meilleur personnel"""

    nom = "base"

    def __init__(self, params: ParametresPSO):
        self.params = params

    def temperature_depart(self) -> float:
        return self.params.temperature_initiale

    def nouvel_etat(self) -> EtatTemperature:
        """Crée l'état d'un nouvel arbre"""
        return EtatTemperature(temperature_courante=self.temperature_depart(),
                               meilleur_personnel=self.params.meilleur_initial)

    def mettre_a_jour(self, etat: EtatTemperature, x: float, gb: Optional[float]) -> float:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(params={self.params})"


class ControleurPSO(ControleurTemperature):
    """Température dynamique : inertie + meilleur personnel + meilleur global"""

    nom = "t2ot"

    def mettre_a_jour(self, etat: EtatTemperature, x: float, gb: Optional[float]) -> float:
        return mettre_a_jour_temperature(self.params, etat, x, gb)


class ControleurFixe(ControleurTemperature):
    """Température constante (recherche arborescente classique)"""

    nom = "tot"

    def __init__(self, params: ParametresPSO, temperature: float):
        super().__init__(params)
        if not params.temperature_min <= temperature <= params.temperature_max:
            raise ValueError(f"Température fixe hors bornes : {temperature}")
        self.temperature = temperature

    def temperature_depart(self) -> float:
        return self.temperature

    def mettre_a_jour(self, etat: EtatTemperature, x: float, gb: Optional[float]) -> float:
        _verifier_fini("x", x)
        pb_prec, gb_prec = references_precedentes(self.params, etat, x, gb)
        _enregistrer(etat, self.temperature, x, pb_prec, gb_prec)
        return self.temperature


class ControleurAleatoire(ControleurTemperature):
    """Température tirée uniformément dans l'intervalle ouvert (min, max) à chaque étape"""

    nom = "tot-random"

    def __init__(self, params: ParametresPSO, temperature_min: float, temperature_max: float, graine: int):
        super().__init__(params)
        if not temperature_min < temperature_max:
            raise ValueError(f"Plage aléatoire vide : ({temperature_min}, {temperature_max})")
        self.temperature_min = temperature_min
        self.temperature_max = temperature_max
        self.graine = graine
        self._generateur = np.random.default_rng(graine)

    def tirer(self) -> float:
        """Tire une température dans l'intervalle ouvert"""
        while True:
            valeur = float(self._generateur.uniform(self.temperature_min, self.temperature_max))
            if self.temperature_min < valeur < self.temperature_max:
                return valeur

    def temperature_depart(self) -> float:
        return self.tirer()

    def nouvel_etat(self) -> EtatTemperature:
        return EtatTemperature(temperature_courante=self.tirer(),
                               meilleur_personnel=self.params.meilleur_initial)

    def mettre_a_jour(self, etat: EtatTemperature, x: float, gb: Optional[float]) -> float:
        _verifier_fini("x", x)
        pb_prec, gb_prec = references_precedentes(self.params, etat, x, gb)
        temperature = self.tirer()
        _enregistrer(etat, temperature, x, pb_prec, gb_prec)
        return temperature


def creer_controleur_fixe(temperature: float, params: Optional[ParametresPSO] = None) -> ControleurFixe:
    """
    Crée un contrôleur qui renvoie toujours la même température

    Args:
        temperature: Température constante
        params: Bornes et a priori (par défaut : bornes standard)

    Returns:
        ControleurFixe
    """
    if params is None:
        params = ParametresPSO(temperature_min=min(TEMPERATURE_MIN_DEFAUT, temperature),
                               temperature_max=max(TEMPERATURE_MAX_DEFAUT, temperature),
                               temperature_initiale=temperature)
    return ControleurFixe(params, temperature)


def creer_controleur_aleatoire(temperature_min: float, temperature_max: float, graine: int,
                               params: Optional[ParametresPSO] = None) -> ControleurAleatoire:
    """
    Crée un contrôleur à température aléatoire reproductible

    Args:
        temperature_min: Borne basse (exclue)
        temperature_max: Borne haute (exclue)
        graine: Graine du générateur

    Returns:
        ControleurAleatoire
    """
    if params is None:
        params = ParametresPSO(temperature_min=0.0, temperature_max=max(1.0, temperature_max))
    return ControleurAleatoire(params, temperature_min, temperature_max, graine)


def creer_controleur(methode: str, params: ParametresPSO, graine: int = 0,
                     plage_aleatoire: Tuple[float, float] = (0.0, 1.0)) -> ControleurTemperature:
    """
    Fabrique le contrôleur correspondant à une méthode

    Args:
        methode: t2ot, tot, tot-random, io ou cot
        params: Paramètres du contrôleur
        graine: Graine (méthode tot-random)
        plage_aleatoire: Intervalle ouvert des tirages (méthode tot-random)

    Raises:
        ValueError: Si la méthode est inconnue
    """
    if methode == "t2ot":
        return ControleurPSO(params)
    if methode in ("tot", "io", "cot"):
        return ControleurFixe(params, params.temperature_initiale)
    if methode == "tot-random":
        return ControleurAleatoire(params, plage_aleatoire[0], plage_aleatoire[1], graine)
    raise ValueError(f"Méthode inconnue : {methode}")
