"""
Module modeles.py
Accès aux modèles de langage : contrat de complétion commun, modèle simulé
déterministe (politiques scriptées), client HTTP de type chat-completions
et comptabilité des tokens / coûts.
"""

import hashlib
import json
import logging
import math
import os
import threading
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import httpx
import numpy as np
from dotenv import load_dotenv
from tenacity import Retrying, retry_if_exception, stop_after_attempt

logger = logging.getLogger(__name__)

PHASES = ("propose", "value", "vote", "write", "judge")
CATEGORIES_ERREUR = ("timeout", "rate-limit", "protocol", "refusal")
CATEGORIES_REESSAYABLES = ("timeout", "rate-limit")

# Bornes acceptées par les fournisseurs pour la température
TEMPERATURE_FIL_MIN = 0.0
TEMPERATURE_FIL_MAX = 2.0

EPSILON_TEMPERATURE = 1e-3
REPONSE_REPLI = ""

Candidat = Tuple[str, float]


class ErreurBackend(Exception):
    """Échec d'un appel modèle après application de la politique de ré-essai"""

    def __init__(self, categorie: str, message: str):
        if categorie not in CATEGORIES_ERREUR:
            raise ValueError(f"Catégorie d'erreur inconnue : {categorie}")
        super().__init__(f"[{categorie}] {message}")
        self.categorie = categorie


def deriver_graine(*parties: Any) -> int:
    """
    Dérive une graine stable à partir de composantes (graine du run, noeud, phase, ...)

    Returns:
        Entier sur 64 bits, indépendant de l'ordre d'exécution des appels
    """
    texte = "|".join(str(p) for p in parties)
    return int.from_bytes(hashlib.sha256(texte.encode("utf-8")).digest()[:8], "big")


def estimer_tokens(texte: str) -> int:
    """Estimation grossière : un token pour quatre caractères"""
    return math.ceil(len(texte) / 4)


@dataclass
class RequeteCompletion:
    """Une demande de complétion, avec sa température et son étiquette de phase"""

    prompt: str
    temperature: float
    nombre_echantillons: int = 1
    max_sortie: int = 1000
    arrets: Optional[List[str]] = None
    etiquette: str = "propose"
    graine: int = 0
    tache: str = ""
    cle_etat: str = ""

    def __post_init__(self):
        if not math.isfinite(self.temperature) or not TEMPERATURE_FIL_MIN <= self.temperature <= TEMPERATURE_FIL_MAX:
            raise ValueError(f"Température hors de [0, 2] : {self.temperature}")
        if self.nombre_echantillons < 1:
            raise ValueError(f"nombre_echantillons doit être ≥ 1 (reçu {self.nombre_echantillons})")
        if self.etiquette not in PHASES:
            raise ValueError(f"Étiquette de phase inconnue : {self.etiquette}")


@dataclass
class Usage:
    tokens_prompt: int = 0
    tokens_generation: int = 0
    estime: bool = False

    def __post_init__(self):
        if self.tokens_prompt < 0 or self.tokens_generation < 0:
            raise ValueError("Les compteurs de tokens doivent être ≥ 0")


@dataclass
class ReponseCompletion:
    """Échantillons renvoyés par un backend et usage associé"""

    echantillons: List[str]
    usage: Usage
    backend: str
    latence: float = 0.0
    tentatives: int = 0


class RegistreUsage:
    """Comptabilité des tokens par phase ; puits sérialisé (thread-safe)"""

    def __init__(self):
        self._verrou = threading.Lock()
        self.par_phase: Dict[str, Dict[str, int]] = {}

    def enregistrer(self, etiquette: str, usage: Usage) -> None:
        """
        Ajoute l'usage d'un appel à la phase correspondante

        Args:
            etiquette: Phase (propose, value, vote, write, judge)
            usage: Usage renvoyé par le backend
        """
        with self._verrou:
            entree = self.par_phase.setdefault(
                etiquette, {"prompt": 0, "generation": 0, "appels": 0, "appels_estimes": 0})
            entree["prompt"] += usage.tokens_prompt
            entree["generation"] += usage.tokens_generation
            entree["appels"] += 1
            if usage.estime:
                entree["appels_estimes"] += 1

    def total(self) -> Dict[str, int]:
        """Somme de toutes les phases"""
        total = {"prompt": 0, "generation": 0, "appels": 0, "appels_estimes": 0}
        for entree in self.par_phase.values():
            for cle in total:
                total[cle] += entree[cle]
        return total

    def to_dict(self) -> Dict[str, Any]:
        return {
            "par_phase": {phase: dict(self.par_phase[phase]) for phase in sorted(self.par_phase)},
            "total": self.total(),
        }

    @classmethod
    def depuis_dict(cls, donnees: Dict[str, Any]) -> "RegistreUsage":
        registre = cls()
        for phase, entree in donnees.get("par_phase", {}).items():
            registre.par_phase[phase] = {
                "prompt": int(entree.get("prompt", 0)),
                "generation": int(entree.get("generation", 0)),
                "appels": int(entree.get("appels", 0)),
                "appels_estimes": int(entree.get("appels_estimes", 0)),
            }
        return registre

    def __repr__(self) -> str:
        total = self.total()
        return f"RegistreUsage(prompt={total['prompt']}, generation={total['generation']}, appels={total['appels']})"


@dataclass
class TableTarifs:
    """Prix par millier de tokens (devise libre)"""

    prix_prompt_1k: float = 0.03
    prix_generation_1k: float = 0.06

    def __post_init__(self):
        if self.prix_prompt_1k < 0 or self.prix_generation_1k < 0:
            raise ValueError("Les prix doivent être ≥ 0")

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def cout(tokens_prompt: float, tokens_generation: float, tarifs: TableTarifs) -> float:
    return tokens_prompt / 1000 * tarifs.prix_prompt_1k + tokens_generation / 1000 * tarifs.prix_generation_1k


def agreger_cout(registre: RegistreUsage, tarifs: TableTarifs) -> Dict[str, Any]:
    """
    Calcule le coût d'un cas, par phase et au total

    Args:
        registre: Registre d'usage d'un run
        tarifs: Table de prix

    Returns:
        Dictionnaire {par_phase, total} avec tokens et coût
    """
    par_phase = {}
    for phase, entree in sorted(registre.par_phase.items()):
        par_phase[phase] = {
            "prompt": entree["prompt"],
            "generation": entree["generation"],
            "cout": cout(entree["prompt"], entree["generation"], tarifs),
        }
    total = registre.total()
    return {
        "par_phase": par_phase,
        "total": {
            "prompt": total["prompt"],
            "generation": total["generation"],
            "cout": cout(total["prompt"], total["generation"], tarifs),
            "appels_estimes": total["appels_estimes"],
        },
    }


def formater_kilo(tokens: float) -> str:
    """5500 → '5.5k'"""
    return f"{tokens / 1000:.1f}k"


class Backend:
    """Contrat commun : complete(requete) → ReponseCompletion"""

    identifiant = "base"

    def completer(self, requete: RequeteCompletion, registre: Optional[RegistreUsage] = None) -> ReponseCompletion:
        """
        Exécute une requête et reporte l'usage dans le registre

        Raises:
            ErreurBackend: Si l'appel échoue définitivement
        """
        debut = time.perf_counter()
        reponse = self._executer(requete)
        reponse.latence = time.perf_counter() - debut
        if registre is not None:
            registre.enregistrer(requete.etiquette, reponse.usage)
        return reponse

    def _executer(self, requete: RequeteCompletion) -> ReponseCompletion:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(id={self.identifiant})"


# ----------------------------------------------------------------------
# Modèle simulé
# ----------------------------------------------------------------------

@dataclass
class RegleScriptee:
    """(tâche, phase, clé d'état) → réponses candidates avec poids de base"""

    tache: str
    phase: str
    cle: str
    candidats: List[Candidat] = field(default_factory=list)

    def __post_init__(self):
        if not self.candidats:
            raise ValueError(f"La règle {self.tache}/{self.phase}/{self.cle} n'a aucun candidat")


class PolitiqueScriptee:
    """Règles statiques et fournisseurs dynamiques de réponses candidates"""

    def __init__(self, nom: str = "personnalisee"):
        self.nom = nom
        self.regles: Dict[Tuple[str, str, str], RegleScriptee] = {}
        self.fournisseurs: Dict[Tuple[str, str], Callable[[str], List[Candidat]]] = {}

    def ajouter_regle(self, regle: RegleScriptee) -> None:
        self.regles[(regle.tache, regle.phase, regle.cle)] = regle

    def ajouter_fournisseur(self, tache: str, phase: str, fournisseur: Callable[[str], List[Candidat]]) -> None:
        self.fournisseurs[(tache, phase)] = fournisseur

    def candidats(self, tache: str, phase: str, cle: str) -> Optional[List[Candidat]]:
        """
        Cherche les candidats : règle exacte, puis règle joker '*', puis fournisseur

        Returns:
            Liste de (texte, poids) ou None si rien ne correspond
        """
        for cle_regle in ((tache, phase, cle), (tache, phase, "*")):
            if cle_regle in self.regles:
                return list(self.regles[cle_regle].candidats)
        fournisseur = self.fournisseurs.get((tache, phase))
        if fournisseur is not None:
            trouves = fournisseur(cle)
            if trouves:
                return trouves
        return None

    def __repr__(self) -> str:
        return f"PolitiqueScriptee(nom={self.nom}, regles={len(self.regles)}, fournisseurs={len(self.fournisseurs)})"


def charger_politique(chemin: str) -> PolitiqueScriptee:
    """
    Charge une politique depuis un fichier JSON
    [{"tache": ..., "phase": ..., "cle": ..., "candidats": [[texte, poids], ...]}, ...]
    """
    try:
        with open(chemin, "r", encoding="utf-8") as f:
            donnees = json.load(f)
    except (IOError, json.JSONDecodeError) as e:
        raise IOError(f"Erreur lors de la lecture de la politique : {e}")
    politique = PolitiqueScriptee(Path(chemin).stem)
    for entree in donnees:
        politique.ajouter_regle(RegleScriptee(
            entree["tache"], entree["phase"], entree.get("cle", "*"),
            [(str(texte), float(poids)) for texte, poids in entree["candidats"]],
        ))
    return politique


def probabilites_softmax(poids: List[float], temperature: float) -> np.ndarray:
    """Softmax des poids de base divisés par max(température, ε)"""
    logits = np.asarray(poids, dtype=np.float64) / max(temperature, EPSILON_TEMPERATURE)
    logits -= logits.max()
    exp = np.exp(logits)
    return exp / exp.sum()


def echantillonner_simule(politique: PolitiqueScriptee, requete: RequeteCompletion, graine: int) -> List[str]:
    """
    Tire les échantillons d'une requête selon la politique scriptée

    Args:
        politique: Règles de réponses candidates
        requete: Requête (tâche, phase, clé d'état, température, nombre)
        graine: Graine dérivée de la requête

    Returns:
        Liste de nombre_echantillons textes
    """
    candidats = politique.candidats(requete.tache, requete.etiquette, requete.cle_etat)
    if not candidats:
        logger.debug("Aucune règle pour %s/%s/%s", requete.tache, requete.etiquette, requete.cle_etat)
        return [REPONSE_REPLI] * requete.nombre_echantillons
    probabilites = probabilites_softmax([poids for _, poids in candidats], requete.temperature)
    generateur = np.random.default_rng(graine)
    indices = generateur.choice(len(candidats), size=requete.nombre_echantillons, p=probabilites)
    return [candidats[int(i)][0] for i in indices]


class ModeleSimule(Backend):
    """Modèle déterministe et sensible à la température, pour les tests et le banc d'essai"""

    identifiant = "simule"

    def __init__(self, politique: PolitiqueScriptee):
        self.politique = politique

    def _executer(self, requete: RequeteCompletion) -> ReponseCompletion:
        echantillons = echantillonner_simule(self.politique, requete, requete.graine)
        usage = Usage(
            tokens_prompt=estimer_tokens(requete.prompt),
            tokens_generation=sum(estimer_tokens(texte) for texte in echantillons),
        )
        return ReponseCompletion(echantillons, usage, self.identifiant)


# ----------------------------------------------------------------------
# Client HTTP chat-completions
# ----------------------------------------------------------------------

class ClientHTTP(Backend):
    """Client pour une API de type chat-completions (JSON), avec ré-essais bornés"""

    identifiant = "http"

    def __init__(self, url_base: str, modele: str, cle_api: Optional[str] = None,
                 variable_cle: str = "OPENAI_API_KEY", delai: float = 60.0, tentatives: int = 3,
                 graine: int = 0, transport: Optional[httpx.BaseTransport] = None,
                 attente: Callable[[float], None] = time.sleep):
        """
        Args:
            url_base: URL de base (ex. https://api.openai.com/v1)
            modele: Identifiant du modèle passé tel quel à l'API
            cle_api: Clé explicite ; sinon lue dans l'environnement (.env accepté)
            variable_cle: Nom de la variable d'environnement contenant la clé
            tentatives: Nombre maximal de tentatives par requête
            graine: Graine du bruit ajouté aux délais d'attente
            transport: Transport httpx (tests)
            attente: Fonction de pause (tests)

        Raises:
            ValueError: Si aucune clé n'est disponible
        """
        if cle_api is None:
            load_dotenv()
            cle_api = os.getenv(variable_cle)
        if not cle_api:
            raise ValueError(f"Clé API absente (variable {variable_cle})")
        self.modele = modele
        self.tentatives = tentatives
        self.attente = attente
        self.graine = graine
        self._client = httpx.Client(
            base_url=url_base,
            headers={"Authorization": f"Bearer {cle_api}"},
            timeout=delai,
            transport=transport,
        )

    @staticmethod
    def _delai_reessai(etat_reessai, bruit: np.random.Generator) -> float:
        # 1s, 2s, 4s + bruit reproductible
        base = 2.0 ** (etat_reessai.attempt_number - 1)
        return base + float(bruit.uniform(0.0, 0.1 * base))

    def _executer(self, requete: RequeteCompletion) -> ReponseCompletion:
        # un générateur par requête : aucun état partagé entre les threads
        bruit = np.random.default_rng(deriver_graine(self.graine, requete.graine, "reessai"))
        reessayeur = Retrying(
            stop=stop_after_attempt(self.tentatives),
            wait=lambda etat: self._delai_reessai(etat, bruit),
            retry=retry_if_exception(
                lambda e: isinstance(e, ErreurBackend) and e.categorie in CATEGORIES_REESSAYABLES),
            sleep=self.attente,
            reraise=True,
        )
        nombre = 0
        for tentative in reessayeur:
            with tentative:
                nombre = tentative.retry_state.attempt_number
                if nombre > 1:
                    logger.warning("Nouvelle tentative %s/%s pour %s", nombre, self.tentatives, requete.etiquette)
                reponse = self._appel_unique(requete)
        reponse.tentatives = nombre - 1
        return reponse

    def corps_requete(self, requete: RequeteCompletion) -> Dict[str, Any]:
        corps = {
            "model": self.modele,
            "messages": [{"role": "user", "content": requete.prompt}],
            "temperature": requete.temperature,
            "n": requete.nombre_echantillons,
            "max_tokens": requete.max_sortie,
        }
        if requete.arrets:
            corps["stop"] = list(requete.arrets)
        return corps

    def _appel_unique(self, requete: RequeteCompletion) -> ReponseCompletion:
        try:
            reponse = self._client.post("/chat/completions", json=self.corps_requete(requete))
        except httpx.TimeoutException as e:
            raise ErreurBackend("timeout", str(e))
        except httpx.TransportError as e:
            raise ErreurBackend("timeout", f"transport : {e}")
        if reponse.status_code == 429:
            raise ErreurBackend("rate-limit", "429 Too Many Requests")
        if reponse.status_code in (401, 403):
            raise ErreurBackend("refusal", f"authentification refusée ({reponse.status_code})")
        if reponse.status_code in (408, 500, 502, 503, 504):
            raise ErreurBackend("timeout", f"erreur serveur {reponse.status_code}")
        if reponse.status_code != 200:
            raise ErreurBackend("protocol", f"statut inattendu {reponse.status_code}")
        try:
            donnees = reponse.json()
        except ValueError as e:
            raise ErreurBackend("protocol", f"JSON invalide : {e}")
        return self.analyser_reponse(requete, donnees)

    def analyser_reponse(self, requete: RequeteCompletion, donnees: Dict[str, Any]) -> ReponseCompletion:
        """
        Convertit une réponse chat-completions en ReponseCompletion

        Raises:
            ErreurBackend: Réponse mal formée (protocol) ou filtrée (refusal)
        """
        choix = donnees.get("choices") if isinstance(donnees, dict) else None
        if not isinstance(choix, list) or not choix:
            raise ErreurBackend("protocol", "champ 'choices' absent ou vide")
        echantillons = []
        for element in choix:
            if not isinstance(element, dict):
                raise ErreurBackend("protocol", f"choix mal formé : {element!r}")
            if element.get("finish_reason") == "content_filter":
                raise ErreurBackend("refusal", "réponse filtrée par le fournisseur")
            message = element.get("message")
            contenu = message.get("content") if isinstance(message, dict) else None
            if not isinstance(contenu, str):
                raise ErreurBackend("protocol", "message sans contenu texte")
            echantillons.append(contenu)
        if len(echantillons) != requete.nombre_echantillons:
            raise ErreurBackend("protocol",
                                f"{len(echantillons)} échantillons reçus, {requete.nombre_echantillons} attendus")
        usage_brut = donnees.get("usage")
        if isinstance(usage_brut, dict) and "prompt_tokens" in usage_brut and "completion_tokens" in usage_brut:
            try:
                usage = Usage(int(usage_brut["prompt_tokens"]), int(usage_brut["completion_tokens"]))
            except (TypeError, ValueError) as e:
                raise ErreurBackend("protocol", f"usage invalide : {e}")
        else:
            usage = Usage(estimer_tokens(requete.prompt),
                          sum(estimer_tokens(texte) for texte in echantillons), estime=True)
        return ReponseCompletion(echantillons, usage, f"{self.identifiant}:{self.modele}")

    def fermer(self) -> None:
        self._client.close()
