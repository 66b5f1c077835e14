"""
Module ecriture_creative.py
Écriture créative : génération de plans, votes, génération du passage à la
température ajustée, validation des contraintes et score de cohérence
(0 à 100) rendu par un modèle juge.
"""

import hashlib
import logging
import re
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from arbre import Arbre, ConfigRecherche
from controleur_temperature import ControleurTemperature
from modeles import (
    Backend,
    Candidat,
    ErreurBackend,
    PolitiqueScriptee,
    RegistreUsage,
    RequeteCompletion,
    deriver_graine,
)
from recherche import DefinitionTache, decrire_appel, executer_en_parallele

logger = logging.getLogger(__name__)

NOMBRE_PHRASES = 4
PROFONDEUR_ECRITURE = 2
SCORE_MIN = 0
SCORE_MAX = 100
SCORE_REPLI = 50
MODES_SCORE = ("gagnant", "max")

TETE_JUGE = "Analyze the following passage in detail, then rate its coherency."
CORPS_JUGE_DEFAUT = (
    "Consider whether each paragraph follows from the previous one, whether the ending sentences "
    "fit naturally, and whether the whole reads as one story. Aim for a normal distribution of "
    "scores with an average of 50."
)
SENTINELLE_JUGE = "Thus, the coherency score is {s}"

PROMPT_PLAN = """Write a coherent passage of 4 short paragraphs. The end sentence of each paragraph must be, in order:
{phrases}

Before writing, make a brief plan. Your output should be of the following format:

Plan:
Your plan here.
"""

PROMPT_PASSAGE = """Write a coherent passage of 4 short paragraphs, separated by blank lines. \
The end sentence of each paragraph must be, in order:
{phrases}

Follow this plan:
{plan}

Passage:
"""

PROMPT_VOTE = """Given an instruction and several choices, decide which choice is most promising. \
Analyze each choice in detail, then conclude in the last line "The best {objet} is {{i}}", where i is \
the number of the choice.

Instruction: write a coherent passage of 4 short paragraphs ending with:
{phrases}

{choix}
"""

PROMPT_IO = """Write a coherent passage of 4 short paragraphs, separated by blank lines. \
The end sentence of each paragraph must be, in order:
{phrases}
"""

PROMPT_COT = """Write a coherent passage of 4 short paragraphs, separated by blank lines. \
The end sentence of each paragraph must be, in order:
{phrases}

Make a plan first, then write. Your output should be of the following format:

Plan:
Your plan here.

Passage:
Your passage here.
"""

_VOTE_MEILLEUR = re.compile(r"best\s+(?:plan|passage|choice)\s+is\s*:?\s*(\d+)", re.IGNORECASE)
_VOTE_PLAN = re.compile(r"\bplan\s+(\d+)\b", re.IGNORECASE)
_VOTE_ENTIER = re.compile(r"^\s*(\d+)\s*\.?\s*$")
_SCORE = re.compile(r"coherency score is\s*(-?\d+)", re.IGNORECASE)
_PONCTUATION_FINALE = ".!?;:,"
_FIN_DE_PHRASE = ".!?\"'”’)"


@dataclass
class InstanceEcriture:
    """Quatre phrases de fin de paragraphe imposées"""

    identifiant: str
    phrases: Tuple[str, ...]

    def __post_init__(self):
        self.phrases = tuple(p.strip() for p in self.phrases)
        if len(self.phrases) != NOMBRE_PHRASES or not all(self.phrases):
            raise ValueError(f"{self.identifiant} : exactement {NOMBRE_PHRASES} phrases non vides attendues")

    def cle(self) -> str:
        return "|".join(self.phrases)

    def lister(self) -> str:
        return "\n".join(f"{i}. {phrase}" for i, phrase in enumerate(self.phrases, start=1))

    def to_dict(self) -> Dict[str, Any]:
        return {"identifiant": self.identifiant, "phrases": list(self.phrases)}


@dataclass
class CandidatPlan:
    texte: str
    votes: int = 0
    score: Optional[int] = None

    def __post_init__(self):
        if self.votes < 0:
            raise ValueError(f"Nombre de votes négatif : {self.votes}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ScoreCoherence:
    valeur: int
    texte_brut: str
    repli: bool = False
    borne: bool = False

    def __post_init__(self):
        if not SCORE_MIN <= self.valeur <= SCORE_MAX:
            raise ValueError(f"Score de cohérence hors de [0, 100] : {self.valeur}")


@dataclass
class ConfigEcriture:
    """Paramètres du pipeline plan → vote → passage"""

    plans: int = 5
    votes: int = 5
    mode_score: str = "gagnant"
    corps_juge: str = CORPS_JUGE_DEFAUT

    def __post_init__(self):
        if self.plans < 1:
            raise ValueError(f"plans doit être ≥ 1 (reçu {self.plans})")
        if self.votes < 1:
            raise ValueError(f"votes doit être ≥ 1 (reçu {self.votes})")
        if self.mode_score not in MODES_SCORE:
            raise ValueError(f"mode_score inconnu : {self.mode_score}. Valides: {MODES_SCORE}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def depuis_dict(cls, donnees: Dict[str, Any]) -> "ConfigEcriture":
        return cls(**donnees)


@dataclass
class ResultatVote:
    gagnant: int
    decompte: List[int]
    ignores: int = 0
    sans_gagnant: bool = False
    appels: List[Dict[str, Any]] = field(default_factory=list)


# ----------------------------------------------------------------------
# Analyse des sorties du modèle
# ----------------------------------------------------------------------

def analyser_vote(texte: str, nombre_choix: int) -> Optional[int]:
    """
    Indice (base 0) du choix voté, ou None si le vote est illisible

    Formes acceptées : 'best plan is i', 'plan i' ou un entier seul (i en base 1).
    """
    texte = texte or ""
    trouves = _VOTE_MEILLEUR.findall(texte) or _VOTE_PLAN.findall(texte)
    if not trouves:
        seul = _VOTE_ENTIER.match(texte)
        trouves = [seul.group(1)] if seul else []
    if not trouves:
        return None
    choix = int(trouves[-1])
    if not 1 <= choix <= nombre_choix:
        return None
    return choix - 1


def depouiller_votes(votes: Sequence[Optional[int]], nombre_choix: int) -> Tuple[int, List[int], bool]:
    """
    Pluralité, égalité au plus petit indice

    Returns:
        (gagnant, décompte par choix, vrai si aucun vote valide)
    """
    decompte = [0] * nombre_choix
    for vote in votes:
        if vote is not None:
            decompte[vote] += 1
    if not any(decompte):
        return 0, decompte, True
    return decompte.index(max(decompte)), decompte, False


def analyser_score(texte: str) -> ScoreCoherence:
    """Dernier entier suivant la sentinelle, borné à [0, 100] ; 50 si absent"""
    trouves = _SCORE.findall(texte or "")
    if not trouves:
        return ScoreCoherence(SCORE_REPLI, texte or "", repli=True)
    brut = int(trouves[-1])
    valeur = min(max(brut, SCORE_MIN), SCORE_MAX)
    return ScoreCoherence(valeur, texte, borne=valeur != brut)


def _normaliser_fin(texte: str) -> str:
    texte = texte.strip()
    if texte and texte[-1] in _PONCTUATION_FINALE:
        texte = texte[:-1].rstrip()
    return texte


def _finit_par_phrase(paragraphe: str, phrase: str) -> bool:
    """Le paragraphe se termine par la phrase entière, au début d'une phrase"""
    texte, cible = _normaliser_fin(paragraphe), _normaliser_fin(phrase)
    if not texte.endswith(cible):
        return False
    avant = texte[:len(texte) - len(cible)]
    if not avant:
        return True
    return avant[-1].isspace() and avant.rstrip()[-1] in _FIN_DE_PHRASE


def decouper_paragraphes(passage: str) -> List[str]:
    """Paragraphes séparés par au moins une ligne vide"""
    return [p.strip() for p in re.split(r"\n\s*\n", passage or "") if p.strip()]


def valider_passage(passage: str, instance: InstanceEcriture) -> Tuple[bool, List[Union[bool, str]]]:
    """
    Vérifie que le passage a 4 paragraphes et que le paragraphe i finit par la phrase i

    Returns:
        (conforme, drapeaux par paragraphe : True, False ou "missing")
    """
    paragraphes = decouper_paragraphes(passage)
    drapeaux: List[Union[bool, str]] = []
    for i, phrase in enumerate(instance.phrases):
        if i >= len(paragraphes):
            drapeaux.append("missing")
        else:
            drapeaux.append(_finit_par_phrase(paragraphes[i], phrase))
    conforme = len(paragraphes) == NOMBRE_PHRASES and all(d is True for d in drapeaux)
    return conforme, drapeaux


def extraire_plan(texte: str) -> str:
    texte = (texte or "").strip()
    if texte.lower().startswith("plan:"):
        texte = texte[len("plan:"):].strip()
    return texte


def extraire_passage(texte: str) -> str:
    texte = (texte or "").strip()
    position = texte.lower().rfind("passage:")
    if position >= 0:
        texte = texte[position + len("passage:"):].strip()
    return texte


def construire_prompt_juge(texte: str, corps: str = CORPS_JUGE_DEFAUT) -> str:
    return (f"{TETE_JUGE}\n{corps}\n"
            f"At the end, conclude with \"{SENTINELLE_JUGE}\", where s is an integer between 0 and 100.\n\n"
            f"Passage:\n{texte}\n")


def construire_prompt_vote(instance: InstanceEcriture, choix: Sequence[str], objet: str = "plan") -> str:
    liste = "\n\n".join(f"Choice {i}:\n{texte}" for i, texte in enumerate(choix, start=1))
    return PROMPT_VOTE.format(objet=objet, phrases=instance.lister(), choix=liste)


# ----------------------------------------------------------------------
# Opérations du pipeline
# ----------------------------------------------------------------------

def _requete(prompt: str, temperature: float, etiquette: str, graine: int, cle: str,
             nombre: int = 1) -> RequeteCompletion:
    return RequeteCompletion(prompt=prompt, temperature=temperature, nombre_echantillons=nombre,
                             etiquette=etiquette, graine=graine, tache=EcritureCreative.nom, cle_etat=cle)


def generer_plans(instance: InstanceEcriture, backend: Backend, nombre: int, temperature: float,
                  graine: int = 0, registre: Optional[RegistreUsage] = None) -> Tuple[List[CandidatPlan], Dict]:
    """
    Demande `nombre` plans en un appel, à la température donnée

    Raises:
        ValueError: Si nombre < 1
        ErreurBackend: Si l'appel échoue
    """
    if nombre < 1:
        raise ValueError(f"Le nombre de plans doit être ≥ 1 (reçu {nombre})")
    requete = _requete(PROMPT_PLAN.format(phrases=instance.lister()), temperature, "propose",
                       deriver_graine(graine, 1, "propose", 0), instance.cle(), nombre)
    reponse = backend.completer(requete, registre)
    return [CandidatPlan(extraire_plan(texte)) for texte in reponse.echantillons], decrire_appel(requete, reponse)


def voter(instance: InstanceEcriture, choix: Sequence[str], backend: Backend, tours: int, temperature: float,
          graine: int = 0, etape: int = 1, objet: str = "plan", registre: Optional[RegistreUsage] = None,
          parallelisme: int = 1) -> ResultatVote:
    """
    Tours de vote indépendants (un appel par tour) puis dépouillement

    Raises:
        ValueError: Si tours < 1 ou s'il n'y a aucun choix
        ErreurBackend: Si un appel échoue
    """
    if tours < 1:
        raise ValueError(f"Le nombre de tours de vote doit être ≥ 1 (reçu {tours})")
    if not choix:
        raise ValueError("Aucun choix à départager")
    prompt = construire_prompt_vote(instance, choix, objet)

    def tour(indice: int):
        requete = _requete(prompt, temperature, "vote", deriver_graine(graine, etape, "vote", indice), instance.cle())
        return requete, backend.completer(requete, registre)

    resultats = executer_en_parallele(tour, list(range(tours)), parallelisme)
    votes = [analyser_vote(reponse.echantillons[0] if reponse.echantillons else "", len(choix))
             for _, reponse in resultats]
    gagnant, decompte, sans_gagnant = depouiller_votes(votes, len(choix))
    if sans_gagnant:
        logger.warning("Aucun vote lisible pour %s : choix 0 retenu", instance.identifiant)
    return ResultatVote(gagnant, decompte, sum(1 for v in votes if v is None), sans_gagnant,
                        [decrire_appel(requete, reponse) for requete, reponse in resultats])


def voter_plans(plans: List[CandidatPlan], instance: InstanceEcriture, backend: Backend, tours: int,
                temperature: float, graine: int = 0, registre: Optional[RegistreUsage] = None,
                parallelisme: int = 1) -> ResultatVote:
    """Vote sur les plans ; les votes reçus sont reportés dans les candidats"""
    resultat = voter(instance, [plan.texte for plan in plans], backend, tours, temperature, graine, 1, "plan",
                     registre, parallelisme)
    for plan, nombre in zip(plans, resultat.decompte):
        plan.votes = nombre
    return resultat


def noter_coherence(texte: str, backend: Backend, temperature: float, graine: int = 0,
                    corps: str = CORPS_JUGE_DEFAUT, registre: Optional[RegistreUsage] = None,
                    cible: Any = 0) -> Tuple[ScoreCoherence, Dict]:
    """
    Fait noter un texte par le juge (0 à 100)

    Raises:
        ErreurBackend: Si l'appel échoue
    """
    requete = _requete(construire_prompt_juge(texte, corps), temperature, "judge",
                       deriver_graine(graine, cible, "judge", 0), texte)
    reponse = backend.completer(requete, registre)
    score = analyser_score(reponse.echantillons[0] if reponse.echantillons else "")
    return score, decrire_appel(requete, reponse)


def noter_etape_plan(plans: List[CandidatPlan], gagnant: int, backend: Backend, temperature: float,
                     mode: str = "gagnant", graine: int = 0, corps: str = CORPS_JUGE_DEFAUT,
                     registre: Optional[RegistreUsage] = None) -> Tuple[float, List[ScoreCoherence], List[Dict]]:
    """
    x de l'étape de plan : score du plan gagnant, ou meilleur score des plans en mode "max"

    Returns:
        (x, scores obtenus, traces des appels)
    """
    if mode not in MODES_SCORE:
        raise ValueError(f"mode_score inconnu : {mode}")
    indices = [gagnant] if mode == "gagnant" else list(range(len(plans)))
    scores, appels = [], []
    for indice in indices:
        score, appel = noter_coherence(plans[indice].texte, backend, temperature, graine, corps, registre,
                                       cible=f"plan-{indice}")
        plans[indice].score = score.valeur
        scores.append(score)
        appels.append(appel)
    return float(max(score.valeur for score in scores)), scores, appels


def generer_passage(plan: str, instance: InstanceEcriture, backend: Backend, temperature: float,
                    nombre: int = 5, tours: int = 5, temperature_vote: float = 0.7, graine: int = 0,
                    registre: Optional[RegistreUsage] = None,
                    parallelisme: int = 1) -> Tuple[List[str], ResultatVote, Dict]:
    """
    Génère `nombre` passages à la température ajustée puis vote

    Returns:
        (passages candidats, résultat du vote, trace de l'appel de génération)
    """
    requete = _requete(PROMPT_PASSAGE.format(phrases=instance.lister(), plan=plan), temperature, "write",
                       deriver_graine(graine, 2, "write", 0), instance.cle(), nombre)
    reponse = backend.completer(requete, registre)
    passages = [extraire_passage(texte) for texte in reponse.echantillons]
    vote = voter(instance, passages, backend, tours, temperature_vote, graine, 2, "passage", registre, parallelisme)
    return passages, vote, decrire_appel(requete, reponse)


# ----------------------------------------------------------------------
# Arbre d'écriture
# ----------------------------------------------------------------------

class ArbreEcriture(Arbre):
    """Deux étapes : plan puis passage ; la température est ajustée entre les deux"""

    def __init__(self, tache: "EcritureCreative", backend: Backend, config: ConfigRecherche, index: int,
                 controleur: ControleurTemperature, graine: int, registre: Optional[RegistreUsage] = None):
        super().__init__(index, controleur, graine, PROFONDEUR_ECRITURE, registre)
        self.tache = tache
        self.backend = backend
        self.config = config
        self.plan: Optional[str] = None
        self.passage: Optional[str] = None
        self.score: Optional[ScoreCoherence] = None

    @property
    def instance(self) -> InstanceEcriture:
        return self.tache.instance

    def _compter_vote(self, vote: ResultatVote) -> None:
        self.compter("votes_ignores", vote.ignores)
        self.compter("votes_sans_gagnant", int(vote.sans_gagnant))

    def _compter_score(self, score: ScoreCoherence) -> None:
        self.compter("juge_repli", int(score.repli))
        self.compter("juge_borne", int(score.borne))

    def executer_etape(self, meilleur_global: Optional[float]) -> None:
        if not self.actif():
            return
        temperature = self.temperature
        self.trajectoire.append(temperature)
        numero = len(self.etapes) + 1
        etape: Dict[str, Any] = {"etape": numero, "temperature": temperature, "appels": []}
        try:
            if numero == 1:
                x = self._etape_plan(temperature, etape)
            else:
                x = self._etape_passage(temperature, etape)
        except ErreurBackend as e:
            self.avorter(e, etape)
            return
        self.etapes.append(etape)
        etape.update(self.cloturer_etape(x, meilleur_global))

    def _etape_plan(self, temperature: float, etape: Dict[str, Any]) -> float:
        ecriture = self.tache.config
        evaluation = self.config.temperature_evaluation
        plans, appel = generer_plans(self.instance, self.backend, ecriture.plans, temperature,
                                     self.graine, self.registre)
        etape["appels"].append(appel)
        vote = voter_plans(plans, self.instance, self.backend, ecriture.votes, evaluation, self.graine,
                           self.registre, self.config.parallelisme)
        etape["appels"].extend(vote.appels)
        self._compter_vote(vote)
        x, scores, appels_juge = noter_etape_plan(plans, vote.gagnant, self.backend, evaluation,
                                                  ecriture.mode_score, self.graine, ecriture.corps_juge,
                                                  self.registre)
        etape["appels"].extend(appels_juge)
        for score in scores:
            self._compter_score(score)
        self.plan = plans[vote.gagnant].texte
        etape.update(type="plan", candidats=[plan.to_dict() for plan in plans], gagnant=vote.gagnant,
                     decompte=vote.decompte)
        return x

    def _etape_passage(self, temperature: float, etape: Dict[str, Any]) -> float:
        ecriture = self.tache.config
        evaluation = self.config.temperature_evaluation
        passages, vote, appel = generer_passage(self.plan or "", self.instance, self.backend, temperature,
                                                ecriture.plans, ecriture.votes, evaluation, self.graine,
                                                self.registre, self.config.parallelisme)
        etape["appels"].append(appel)
        etape["appels"].extend(vote.appels)
        self._compter_vote(vote)
        self.passage = passages[vote.gagnant]
        score, appel_juge = noter_coherence(self.passage, self.backend, evaluation, self.graine,
                                            ecriture.corps_juge, self.registre, cible="passage")
        etape["appels"].append(appel_juge)
        self._compter_score(score)
        self.score = score
        conforme, drapeaux = valider_passage(self.passage, self.instance)
        etape.update(type="passage", candidats=passages, gagnant=vote.gagnant, decompte=vote.decompte,
                     score=score.valeur, conforme=conforme, drapeaux=drapeaux)
        return float(score.valeur)

    def reponse(self) -> Optional[str]:
        return self.passage

    def score_reponse(self) -> float:
        return float(self.score.valeur) if self.score is not None else float("-inf")

    def to_dict(self) -> Dict[str, Any]:
        donnees = super().to_dict()
        donnees["plan"] = self.plan
        donnees["score"] = self.score.valeur if self.score is not None else None
        return donnees


class EcritureCreative(DefinitionTache):
    """Tâche d'écriture créative liée à une instance"""

    nom = "creative-writing"

    def __init__(self, instance: InstanceEcriture, config: Optional[ConfigEcriture] = None):
        self.instance = instance
        self.config = config or ConfigEcriture()

    def creer_arbre(self, index: int, controleur: ControleurTemperature, graine: int,
                    config: ConfigRecherche, backend: Backend, registre: RegistreUsage) -> Arbre:
        return ArbreEcriture(self, backend, config, index, controleur, graine, registre)

    def cle_baseline(self) -> str:
        return self.instance.cle()

    def construire_prompt_io(self) -> str:
        return PROMPT_IO.format(phrases=self.instance.lister())

    def construire_prompt_cot(self) -> str:
        return PROMPT_COT.format(phrases=self.instance.lister())

    def extraire_reponse_texte(self, texte: str) -> Optional[str]:
        passage = extraire_passage(texte)
        return passage or None

    def verifier_reponse(self, reponse: Optional[str]) -> bool:
        return bool(reponse) and valider_passage(reponse, self.instance)[0]

    def __repr__(self) -> str:
        return f"EcritureCreative(instance={self.instance.identifiant})"


# ----------------------------------------------------------------------
# Instances
# ----------------------------------------------------------------------

def charger_instances(chemin: str) -> List[InstanceEcriture]:
    """
    Charge des groupes de 4 phrases séparés par des lignes vides

    Raises:
        IOError: Si le fichier est illisible
        ValueError: Si un groupe n'a pas exactement 4 phrases
    """
    try:
        contenu = Path(chemin).read_text(encoding="utf-8")
    except OSError as e:
        raise IOError(f"Erreur lors de la lecture des instances : {e}")
    instances = []
    for numero, bloc in enumerate(decouper_paragraphes(contenu), start=1):
        phrases = tuple(ligne for ligne in bloc.splitlines() if ligne.strip())
        instances.append(InstanceEcriture(f"cw-{numero:03d}", phrases))
    if not instances:
        raise ValueError(f"{chemin} : aucune instance")
    return instances


def ecrire_instances(instances: List[InstanceEcriture], chemin: str) -> None:
    Path(chemin).parent.mkdir(parents=True, exist_ok=True)
    blocs = ["\n".join(instance.phrases) for instance in instances]
    Path(chemin).write_text("\n\n".join(blocs) + "\n", encoding="utf-8")


SUJETS = ("The old lighthouse", "A quiet neighbor", "The silver bicycle", "My grandmother", "The city library",
          "A lost kitten", "The morning train", "Our garden", "The violin lesson", "A folded boat")
VERBES = ("waited for", "remembered", "carried", "painted", "forgot", "followed", "opened", "repaired")
COMPLEMENTS = ("the last letter", "a blue umbrella", "the winter storm", "an empty map", "the festival lights",
               "a broken clock", "the secret door", "the first snow")


def generer_instances(nombre: int, graine: int = 0) -> List[InstanceEcriture]:
    """Instances de remplacement : phrases simples tirées au hasard"""
    if nombre < 1:
        raise ValueError(f"nombre doit être ≥ 1 (reçu {nombre})")
    generateur = np.random.default_rng(graine)
    instances = []
    for numero in range(1, nombre + 1):
        phrases = tuple(
            f"{SUJETS[generateur.integers(len(SUJETS))]} {VERBES[generateur.integers(len(VERBES))]} "
            f"{COMPLEMENTS[generateur.integers(len(COMPLEMENTS))]}."
            for _ in range(NOMBRE_PHRASES)
        )
        instances.append(InstanceEcriture(f"cw-{numero:03d}", phrases))
    return instances


# ----------------------------------------------------------------------
# Politique scriptée par défaut
# ----------------------------------------------------------------------

STYLES_PLAN = (("a journey told in four stages", 2.0), ("a letter written over four days", 1.6),
               ("a small mystery solved step by step", 1.3), ("four memories of one summer", 1.1),
               ("a conversation between two strangers", 1.0))


def _plans_defaut(cle: str) -> List[Candidat]:
    phrases = cle.split("|")
    if len(phrases) != NOMBRE_PHRASES:
        return []
    return [(f"Plan:\nTell {style}. " + " ".join(f"Paragraph {i} leads to: {p}" for i, p in enumerate(phrases, 1)),
             poids) for style, poids in STYLES_PLAN]


def _passages_defaut(cle: str) -> List[Candidat]:
    phrases = cle.split("|")
    if len(phrases) != NOMBRE_PHRASES:
        return []
    ouvertures = ("It began on an ordinary day.", "Nobody expected what came next.",
                  "By then the answer seemed close.", "In the end everything made sense.")
    conforme = "\n\n".join(f"{o} {p}" for o, p in zip(ouvertures, phrases))
    trois = "\n\n".join(f"{o} {p}" for o, p in zip(ouvertures[:3], phrases[:3]))
    desordre = "\n\n".join(f"{o} {p}" for o, p in zip(ouvertures, reversed(phrases)))
    return [(f"Passage:\n{conforme}", 2.0), (f"Passage:\n{trois}", 1.0), (f"Passage:\n{desordre}", 0.8)]


def _votes_defaut(cle: str) -> List[Candidat]:
    return [("Choice 1 is the most coherent. The best plan is 1", 2.0),
            ("Choice 2 flows better. The best plan is 2", 1.5),
            ("The best plan is 3", 1.0),
            ("plan 4", 0.5),
            ("I cannot decide between them.", 0.3)]


def _jugements_defaut(cle: str) -> List[Candidat]:
    base = 40 + int(hashlib.sha256(cle.encode("utf-8")).hexdigest(), 16) % 31
    if len(decouper_paragraphes(extraire_passage(cle))) == NOMBRE_PHRASES:
        base += 15
    return [(f"The passage is analyzed above. {SENTINELLE_JUGE.format(s=base)}", 2.0),
            (f"Some transitions are abrupt. {SENTINELLE_JUGE.format(s=base - 6)}", 1.0),
            (f"Strong ending. {SENTINELLE_JUGE.format(s=base + 6)}", 1.0),
            ("The passage reads well overall.", 0.2)]


def politique_ecriture_defaut() -> PolitiqueScriptee:
    """Plans de styles variés, passages conformes ou non, votes et jugements simulés"""
    politique = PolitiqueScriptee("ecriture-defaut")
    politique.ajouter_fournisseur(EcritureCreative.nom, "propose", _plans_defaut)
    politique.ajouter_fournisseur(EcritureCreative.nom, "write", _passages_defaut)
    politique.ajouter_fournisseur(EcritureCreative.nom, "vote", _votes_defaut)
    politique.ajouter_fournisseur(EcritureCreative.nom, "judge", _jugements_defaut)
    return politique
