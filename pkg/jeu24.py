"""
Module jeu24.py
Jeu de 24 : états en arithmétique rationnelle exacte, analyse des
propositions du modèle, classement des valeurs, vérification des
expressions finales et oracle exhaustif des types de solutions.
"""

import itertools
import logging
import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from modeles import Candidat, PolitiqueScriptee, RegleScriptee
from recherche import DefinitionTache, Proposition

logger = logging.getLogger(__name__)

CIBLE = Fraction(24)
NOMBRE_CARTES = 4
OPERATEURS = ("+", "-", "*", "/")
SYNONYMES_OPERATEURS = {"×": "*", "÷": "/", "−": "-"}

LABELS_VALEUR = ("sure", "maybe", "impossible")
LABEL_REPLI = "maybe"
SCORES_VALEUR = {"sure": 1.0, "maybe": 0.5, "impossible": 0.0}


# ----------------------------------------------------------------------
# Expressions
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Nombre:
    valeur: int


@dataclass(frozen=True)
class Operation:
    operateur: str
    gauche: "Expression"
    droite: "Expression"


Expression = Union[Nombre, Operation]


class ErreurSyntaxe(ValueError):
    """Expression arithmétique mal formée"""


_JETON = re.compile(r"\s*(?:(\d+)|(\S))")


def _normaliser_operateurs(texte: str) -> str:
    for symbole, operateur in SYNONYMES_OPERATEURS.items():
        texte = texte.replace(symbole, operateur)
    return texte


def _decouper(texte: str) -> List[str]:
    jetons = []
    position = 0
    texte = _normaliser_operateurs(texte).rstrip()
    while position < len(texte):
        correspondance = _JETON.match(texte, position)
        if correspondance is None:
            break
        nombre, symbole = correspondance.groups()
        if symbole is not None and symbole not in "+-*/()":
            raise ErreurSyntaxe(f"Caractère inattendu : {symbole!r}")
        jetons.append(nombre if nombre is not None else symbole)
        position = correspondance.end()
    return jetons


class _Analyseur:
    """Descente récursive : expr := terme (+|- terme)* ; terme := facteur (*|/ facteur)*"""

    def __init__(self, jetons: List[str]):
        self.jetons = jetons
        self.position = 0

    def _courant(self) -> Optional[str]:
        return self.jetons[self.position] if self.position < len(self.jetons) else None

    def _consommer(self) -> str:
        jeton = self._courant()
        if jeton is None:
            raise ErreurSyntaxe("Fin d'expression inattendue")
        self.position += 1
        return jeton

    def expression(self) -> Expression:
        gauche = self.terme()
        while self._courant() in ("+", "-"):
            operateur = self._consommer()
            gauche = Operation(operateur, gauche, self.terme())
        return gauche

    def terme(self) -> Expression:
        gauche = self.facteur()
        while self._courant() in ("*", "/"):
            operateur = self._consommer()
            gauche = Operation(operateur, gauche, self.facteur())
        return gauche

    def facteur(self) -> Expression:
        jeton = self._consommer()
        if jeton == "(":
            interieur = self.expression()
            if self._consommer() != ")":
                raise ErreurSyntaxe("Parenthèse fermante attendue")
            return interieur
        if jeton.isdigit():
            return Nombre(int(jeton))
        raise ErreurSyntaxe(f"Jeton inattendu : {jeton!r}")


def analyser_expression(texte: str) -> Expression:
    """
    Analyse une expression infixe sur des entiers (+ - * / et parenthèses)

    Raises:
        ErreurSyntaxe: Si le texte n'est pas une expression valide
    """
    jetons = _decouper(texte)
    if not jetons:
        raise ErreurSyntaxe("Expression vide")
    analyseur = _Analyseur(jetons)
    expression = analyseur.expression()
    if analyseur.position != len(jetons):
        raise ErreurSyntaxe(f"Jeton en trop : {jetons[analyseur.position]!r}")
    return expression


def appliquer_operateur(operateur: str, gauche: Fraction, droite: Fraction) -> Fraction:
    """Raises ZeroDivisionError pour une division par zéro"""
    if operateur == "+":
        return gauche + droite
    if operateur == "-":
        return gauche - droite
    if operateur == "*":
        return gauche * droite
    if operateur == "/":
        if droite == 0:
            raise ZeroDivisionError("division par zéro")
        return gauche / droite
    raise ValueError(f"Opérateur inconnu : {operateur}")


def evaluer(expression: Expression) -> Fraction:
    """Valeur exacte d'une expression"""
    if isinstance(expression, Nombre):
        return Fraction(expression.valeur)
    return appliquer_operateur(expression.operateur, evaluer(expression.gauche), evaluer(expression.droite))


def feuilles(expression: Expression) -> List[int]:
    if isinstance(expression, Nombre):
        return [expression.valeur]
    return feuilles(expression.gauche) + feuilles(expression.droite)


def verifier_expression(expression: Expression, origine: Sequence[int]) -> bool:
    """Vrai si l'expression utilise exactement les nombres d'origine et vaut 24"""
    if sorted(feuilles(expression)) != sorted(origine):
        return False
    try:
        return evaluer(expression) == CIBLE
    except ZeroDivisionError:
        return False


def verifier_texte(texte: Optional[str], origine: Sequence[int]) -> bool:
    """Comme verifier_expression, à partir d'un texte (faux si illisible)"""
    if not texte:
        return False
    try:
        return verifier_expression(analyser_expression(texte), origine)
    except ErreurSyntaxe:
        return False


def rendre(expression: Expression) -> str:
    """Rendu entièrement parenthésé"""
    if isinstance(expression, Nombre):
        return str(expression.valeur)
    return f"({rendre(expression.gauche)}{expression.operateur}{rendre(expression.droite)})"


def _aplatir(expression: Expression, operateur: str) -> List[Expression]:
    if isinstance(expression, Operation) and expression.operateur == operateur:
        return _aplatir(expression.gauche, operateur) + _aplatir(expression.droite, operateur)
    return [expression]


def canonicaliser(expression: Expression) -> str:
    """
    Clé du type de solution : chaînes de + et de * aplaties, opérandes triés

    - et / restent binaires et ordonnés. Le résultat est lui-même une
    expression valide, et canonicaliser est idempotent.
    """
    if isinstance(expression, Nombre):
        return str(expression.valeur)
    operateur = expression.operateur
    if operateur in ("+", "*"):
        operandes = sorted(canonicaliser(e) for e in _aplatir(expression, operateur))
        return "(" + operateur.join(operandes) + ")"
    return f"({canonicaliser(expression.gauche)}{operateur}{canonicaliser(expression.droite)})"


def canonicaliser_texte(texte: str) -> str:
    return canonicaliser(analyser_expression(texte))


# ----------------------------------------------------------------------
# Oracle
# ----------------------------------------------------------------------

def _verifier_origine(origine: Sequence[int]) -> Tuple[int, ...]:
    if len(origine) != NOMBRE_CARTES:
        raise ValueError(f"Quatre nombres attendus (reçu {len(origine)})")
    if any(int(n) != n or n < 0 for n in origine):
        raise ValueError(f"Les nombres doivent être des entiers positifs : {origine}")
    return tuple(int(n) for n in origine)


def _combiner(nombres: Tuple[int, ...]) -> Iterator[Tuple[Fraction, Expression]]:
    """Toutes les expressions sur une suite ordonnée de feuilles, avec leur valeur"""
    if len(nombres) == 1:
        yield Fraction(nombres[0]), Nombre(nombres[0])
        return
    for coupure in range(1, len(nombres)):
        for valeur_g, gauche in _expressions(nombres[:coupure]):
            for valeur_d, droite in _expressions(nombres[coupure:]):
                for operateur in OPERATEURS:
                    try:
                        valeur = appliquer_operateur(operateur, valeur_g, valeur_d)
                    except ZeroDivisionError:
                        continue
                    yield valeur, Operation(operateur, gauche, droite)


@lru_cache(maxsize=8192)
def _expressions(nombres: Tuple[int, ...]) -> Tuple[Tuple[Fraction, Expression], ...]:
    return tuple(_combiner(nombres))


@lru_cache(maxsize=4096)
def _solutions(origine_triee: Tuple[int, ...]) -> FrozenSet[str]:
    cles = set()
    for permutation in set(itertools.permutations(origine_triee)):
        for valeur, expression in _combiner(permutation):
            if valeur == CIBLE:
                cles.add(canonicaliser(expression))
    return frozenset(cles)


def resoudre_oracle(origine: Sequence[int]) -> Set[str]:
    """
    Énumère toutes les solutions : ordres des opérandes, opérateurs et
    les cinq formes d'arbre binaire à quatre feuilles

    Args:
        origine: Les quatre nombres

    Returns:
        Ensemble des formes canoniques (vide si insoluble)
    """
    return set(_solutions(tuple(sorted(_verifier_origine(origine)))))


@lru_cache(maxsize=None)
def _atteignable(restants: Tuple[Fraction, ...]) -> bool:
    if len(restants) == 1:
        return restants[0] == CIBLE
    for i, j in itertools.combinations(range(len(restants)), 2):
        autres = [restants[k] for k in range(len(restants)) if k not in (i, j)]
        a, b = restants[i], restants[j]
        resultats = {a + b, a * b, a - b, b - a}
        if b != 0:
            resultats.add(a / b)
        if a != 0:
            resultats.add(b / a)
        for resultat in resultats:
            if _atteignable(tuple(sorted(autres + [resultat]))):
                return True
    return False


def peut_atteindre_24(restants: Sequence[Fraction]) -> bool:
    """Vrai si les nombres restants permettent encore d'obtenir 24"""
    return _atteignable(tuple(sorted(Fraction(n) for n in restants)))


def diversite_solutions(expressions: List[str]) -> List[Tuple[str, float, int]]:
    """
    Histogramme des types de solutions

    Args:
        expressions: Expressions finales vérifiées

    Returns:
        Liste de (forme canonique, fréquence, nombre), fréquences décroissantes
    """
    if not expressions:
        return []
    comptes = Counter(canonicaliser_texte(texte) for texte in expressions)
    total = sum(comptes.values())
    return [(cle, nombre / total, nombre)
            for cle, nombre in sorted(comptes.items(), key=lambda item: (-item[1], item[0]))]


# ----------------------------------------------------------------------
# États et propositions
# ----------------------------------------------------------------------

def formater_nombre(valeur: Fraction) -> str:
    return str(valeur.numerator) if valeur.denominator == 1 else f"{valeur.numerator}/{valeur.denominator}"


def formater_nombres(valeurs: Sequence[Fraction]) -> str:
    return " ".join(formater_nombre(v) for v in valeurs)


@dataclass(frozen=True)
class EtatJeu24:
    """Nombres restants, sous-expressions associées et opérations jouées"""

    origine: Tuple[int, ...]
    restants: Tuple[Fraction, ...]
    expressions: Tuple[str, ...]
    trace: Tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.restants) != len(self.origine) - len(self.trace):
            raise ValueError("Il faut |restants| = 4 - |trace|")
        if len(self.expressions) != len(self.restants):
            raise ValueError("Une sous-expression par nombre restant est attendue")

    @classmethod
    def initial(cls, origine: Sequence[int]) -> "EtatJeu24":
        origine = _verifier_origine(origine)
        return cls(origine, tuple(Fraction(n) for n in origine), tuple(str(n) for n in origine))

    def cle(self) -> str:
        return formater_nombres(self.restants)

    def est_terminal(self) -> bool:
        return len(self.restants) == 1

    def appliquer(self, a: Fraction, operateur: str, b: Fraction) -> "EtatJeu24":
        """
        Joue a op b sur les nombres restants

        Raises:
            ValueError: Si a ou b ne font pas partie des restants
            ZeroDivisionError: Pour une division par zéro
        """
        indices = list(range(len(self.restants)))
        try:
            i = next(k for k in indices if self.restants[k] == a)
            j = next(k for k in indices if k != i and self.restants[k] == b)
        except StopIteration:
            raise ValueError(f"{formater_nombre(a)} ou {formater_nombre(b)} absent de {self.cle()}")
        resultat = appliquer_operateur(operateur, a, b)
        paires = [(self.restants[k], self.expressions[k]) for k in indices if k not in (i, j)]
        paires.append((resultat, f"({self.expressions[i]}{operateur}{self.expressions[j]})"))
        paires.sort()
        operation = f"{formater_nombre(a)} {operateur} {formater_nombre(b)} = {formater_nombre(resultat)}"
        return EtatJeu24(self.origine, tuple(v for v, _ in paires), tuple(e for _, e in paires),
                         self.trace + (operation,))


class MotifRejet(Enum):
    FORMAT = "format"
    DIVISION_PAR_ZERO = "division_par_zero"
    NOMBRES_ABSENTS = "nombres_absents"
    ARITHMETIQUE = "arithmetique"


_NOMBRE = r"-?\d+(?:/\d+)?"
_LIGNE_PROPOSITION = re.compile(
    rf"^\s*({_NOMBRE})\s*([-+*/×÷−])\s*({_NOMBRE})\s*=\s*({_NOMBRE})\s*(?:\(left:[^)]*\))?\s*$",
    re.IGNORECASE,
)


def decrire_coup(etat: EtatJeu24) -> str:
    """Ligne normalisée du dernier coup : 'a op b = c (left: ...)'"""
    return f"{etat.trace[-1]} (left: {etat.cle()})"


def analyser_proposition(etat: EtatJeu24, ligne: str) -> Tuple[Optional[EtatJeu24], Optional[MotifRejet]]:
    """
    Analyse une ligne 'a op b = c (left: ...)'

    La liste 'left' n'est jamais lue : les restants sont recalculés.

    Returns:
        (état enfant, None) si la ligne est acceptée, sinon (None, motif)
    """
    correspondance = _LIGNE_PROPOSITION.match(ligne)
    if correspondance is None:
        return None, MotifRejet.FORMAT
    texte_a, operateur, texte_b, texte_c = correspondance.groups()
    operateur = SYNONYMES_OPERATEURS.get(operateur, operateur)
    try:
        a, b, c = Fraction(texte_a), Fraction(texte_b), Fraction(texte_c)
    except (ValueError, ZeroDivisionError):
        return None, MotifRejet.FORMAT
    if operateur == "/" and b == 0:
        return None, MotifRejet.DIVISION_PAR_ZERO
    disponibles = Counter(etat.restants)
    if disponibles[a] < 1 or disponibles[b] < (2 if a == b else 1):
        return None, MotifRejet.NOMBRES_ABSENTS
    if appliquer_operateur(operateur, a, b) != c:
        return None, MotifRejet.ARITHMETIQUE
    return etat.appliquer(a, operateur, b), None


def rejouer_trace(origine: Sequence[int], trace: Sequence[str]) -> EtatJeu24:
    """
    Rejoue une suite d'opérations depuis l'origine

    Raises:
        ValueError: Si une opération est invalide
    """
    etat = EtatJeu24.initial(origine)
    for operation in trace:
        etat, motif = analyser_proposition(etat, operation)
        if etat is None:
            raise ValueError(f"Opération invalide ({motif.value}) : {operation}")
    return etat


def coups_legaux(restants: Sequence[Fraction]) -> List[Tuple[str, Tuple[Fraction, ...]]]:
    """Toutes les lignes de proposition valides et les restants qui en résultent"""
    coups = []
    vus = set()
    restants = list(restants)
    for i, j in itertools.combinations(range(len(restants)), 2):
        a, b = restants[i], restants[j]
        autres = [restants[k] for k in range(len(restants)) if k not in (i, j)]
        for x, operateur, y in ((a, "+", b), (a, "*", b), (a, "-", b), (b, "-", a), (a, "/", b), (b, "/", a)):
            if operateur == "/" and y == 0:
                continue
            resultat = appliquer_operateur(operateur, x, y)
            suivants = tuple(sorted(autres + [resultat]))
            ligne = (f"{formater_nombre(x)} {operateur} {formater_nombre(y)} = {formater_nombre(resultat)} "
                     f"(left: {formater_nombres(suivants)})")
            if ligne not in vus:
                vus.add(ligne)
                coups.append((ligne, suivants))
    return coups


# ----------------------------------------------------------------------
# Valeurs
# ----------------------------------------------------------------------

_LABEL = re.compile(r"\b(sure|likely|maybe|impossible)\b", re.IGNORECASE)


def classer_valeur(texte: str) -> Tuple[str, bool]:
    """
    Label d'un échantillon de valeur : le dernier mot-clé présent l'emporte

    Returns:
        (label, vrai si aucun mot-clé n'a été trouvé et que 'maybe' a été utilisé)
    """
    trouves = _LABEL.findall(texte or "")
    if not trouves:
        return LABEL_REPLI, True
    label = trouves[-1].lower()
    return ("maybe" if label == "likely" else label), False


def valeur_vers_score(label: str, scores: Optional[Dict[str, float]] = None) -> float:
    scores = scores or SCORES_VALEUR
    if label not in scores:
        raise ValueError(f"Label de valeur inconnu : {label}")
    return scores[label]


# ----------------------------------------------------------------------
# Prompts
# ----------------------------------------------------------------------

PROMPT_PROPOSITION = """Combine the numbers with + - * / to reach 24. At each step pick two of the remaining \
numbers and replace them with the result.
Write one step per line as: a op b = c (left: remaining numbers)
Example:
Input: 4 9 10 13
13 - 9 = 4 (left: 4 4 10)
10 - 4 = 6 (left: 4 6 13)
4 * 13 = 52 (left: 9 10 52)
Input: {entree}
Steps:
"""

PROMPT_FINAL = """Numbers {origine} have been combined step by step into 24:
{etapes}
Write the whole computation as one expression using each input number once.
Answer:"""

PROMPT_VALEUR = """Can these numbers still reach 24 with + - * /? Reason briefly, then finish with one word: \
sure, maybe or impossible.
Example:
10 14
10 + 14 = 24
sure
Example:
1 3 3
1 * 3 * 3 = 9, (1 + 3) * 3 = 12, numbers are too small
impossible
Input: {entree}
"""

PROMPT_IO = """Use the four numbers and + - * / to obtain 24, each number exactly once.
Reply with one line: Answer: <expression> = 24
Input: {entree}
"""

PROMPT_COT = """Use the four numbers and + - * / to obtain 24, each number exactly once.
Work step by step, one operation per line as: a op b = c (left: remaining numbers).
Finish with one line: Answer: <expression> = 24
Input: {entree}
"""

_REPONSE = re.compile(r"answer\s*:\s*(.+?)\s*=\s*24\b", re.IGNORECASE)


def construire_prompt_proposition(etat: EtatJeu24) -> str:
    if etat.est_terminal():
        return PROMPT_FINAL.format(origine=" ".join(map(str, etat.origine)), etapes="\n".join(etat.trace))
    return PROMPT_PROPOSITION.format(entree=etat.cle())


def construire_prompt_valeur(etat: EtatJeu24) -> str:
    return PROMPT_VALEUR.format(entree=etat.cle())


def extraire_reponse_texte(texte: str) -> Optional[str]:
    """Expression de la dernière ligne 'Answer: ... = 24', ou None"""
    trouves = _REPONSE.findall(texte or "")
    return trouves[-1].strip() if trouves else None


class Jeu24(DefinitionTache):
    """Une partie du jeu de 24"""

    nom = "game24"

    def __init__(self, origine: Sequence[int], scores: Optional[Dict[str, float]] = None):
        self.origine = _verifier_origine(origine)
        self.scores = dict(scores or SCORES_VALEUR)

    def etat_initial(self) -> EtatJeu24:
        return EtatJeu24.initial(self.origine)

    def cle_etat(self, etat: EtatJeu24) -> str:
        return etat.cle()

    def contenu(self, etat: EtatJeu24) -> str:
        return decrire_coup(etat) if etat.trace else etat.cle()

    def construire_prompt_proposition(self, etat: EtatJeu24) -> str:
        return construire_prompt_proposition(etat)

    def construire_prompt_valeur(self, etat: EtatJeu24) -> str:
        return construire_prompt_valeur(etat)

    def analyser_propositions(self, etat: EtatJeu24, texte: str) -> Tuple[List[Proposition], List[str]]:
        acceptees: List[Proposition] = []
        motifs: List[str] = []
        for ligne in (texte or "").splitlines():
            if not ligne.strip():
                continue
            enfant, motif = analyser_proposition(etat, ligne)
            if enfant is None:
                motifs.append(motif.value)
            else:
                acceptees.append((decrire_coup(enfant), enfant))
        return acceptees, motifs

    def analyser_valeur(self, texte: str) -> Tuple[str, bool]:
        return classer_valeur(texte)

    def valeur_vers_score(self, label: str) -> float:
        return valeur_vers_score(label, self.scores)

    def est_terminal(self, etat: EtatJeu24) -> bool:
        return etat.est_terminal()

    def extraire_reponse(self, etat: EtatJeu24) -> Optional[str]:
        """Expression reconstruite à partir des sous-expressions suivies"""
        if not etat.est_terminal() or etat.restants[0] != CIBLE:
            return None
        # La sous-expression finale est toujours entourée d'une paire de parenthèses
        return etat.expressions[0][1:-1]

    def cle_baseline(self) -> str:
        return " ".join(map(str, self.origine))

    def construire_prompt_io(self) -> str:
        return PROMPT_IO.format(entree=self.cle_baseline())

    def construire_prompt_cot(self) -> str:
        return PROMPT_COT.format(entree=self.cle_baseline())

    def extraire_reponse_texte(self, texte: str) -> Optional[str]:
        return extraire_reponse_texte(texte)

    def verifier_reponse(self, reponse: Optional[str]) -> bool:
        return verifier_texte(reponse, self.origine)

    def __repr__(self) -> str:
        return f"Jeu24(origine={self.cle_baseline()})"


# ----------------------------------------------------------------------
# Jeu de données
# ----------------------------------------------------------------------

def charger_jeu_donnees(chemin: str) -> List[Tuple[int, ...]]:
    """
    Charge un fichier d'instances : quatre entiers séparés par des espaces par ligne

    Raises:
        IOError: Si le fichier est illisible
        ValueError: Si une ligne est mal formée
    """
    try:
        lignes = Path(chemin).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise IOError(f"Erreur lors de la lecture du jeu de données : {e}")
    instances = []
    for numero, ligne in enumerate(lignes, start=1):
        if not ligne.strip():
            continue
        try:
            instances.append(_verifier_origine([int(v) for v in ligne.split()]))
        except ValueError as e:
            raise ValueError(f"{chemin}, ligne {numero} : {e}")
    if not instances:
        raise ValueError(f"{chemin} : aucune instance")
    return instances


def ecrire_jeu_donnees(instances: List[Sequence[int]], chemin: str) -> None:
    Path(chemin).parent.mkdir(parents=True, exist_ok=True)
    contenu = "".join(" ".join(map(str, instance)) + "\n" for instance in instances)
    Path(chemin).write_text(contenu, encoding="utf-8")


def generer_jeu_donnees(nombre: int, graine: int = 0, valeur_min: int = 1, valeur_max: int = 13,
                        solubles_seulement: bool = True) -> List[Tuple[int, ...]]:
    """
    Génère des instances distinctes (multiensembles) de quatre entiers

    Args:
        nombre: Nombre d'instances
        graine: Graine du générateur
        valeur_min: Plus petite valeur
        valeur_max: Plus grande valeur
        solubles_seulement: Ne garder que les instances qui admettent une solution

    Raises:
        ValueError: Si les paramètres ne permettent pas d'obtenir assez d'instances
    """
    if nombre < 1:
        raise ValueError(f"nombre doit être ≥ 1 (reçu {nombre})")
    if not 0 < valeur_min <= valeur_max:
        raise ValueError(f"Plage de valeurs invalide : [{valeur_min}, {valeur_max}]")
    generateur = np.random.default_rng(graine)
    vues = set()
    instances = []
    essais = 0
    while len(instances) < nombre:
        essais += 1
        if essais > 1000 * nombre:
            raise ValueError(f"Impossible de générer {nombre} instances distinctes")
        instance = tuple(int(v) for v in generateur.integers(valeur_min, valeur_max + 1, size=NOMBRE_CARTES))
        cle = tuple(sorted(instance))
        if cle in vues:
            continue
        vues.add(cle)
        if solubles_seulement and not resoudre_oracle(instance):
            continue
        instances.append(instance)
    return instances


# ----------------------------------------------------------------------
# Politiques scriptées
# ----------------------------------------------------------------------

def _lire_cle(cle: str) -> Optional[List[Fraction]]:
    try:
        return [Fraction(v) for v in cle.split()]
    except (ValueError, ZeroDivisionError):
        return None


@lru_cache(maxsize=None)
def _propositions_resolution(cle: str) -> Tuple[Candidat, ...]:
    restants = _lire_cle(cle)
    if not restants or len(restants) < 2:
        return ()
    return tuple((ligne, 2.0 if peut_atteindre_24(suivants) else 1.0)
                 for ligne, suivants in coups_legaux(restants))


def _valeurs_resolution(cle: str) -> List[Candidat]:
    restants = _lire_cle(cle)
    if not restants:
        return []
    if peut_atteindre_24(restants):
        return [("sure", 2.0), ("maybe", 1.0), ("impossible", 0.0)]
    return [("impossible", 2.0), ("maybe", 1.0), ("sure", 0.0)]


@lru_cache(maxsize=None)
def _reponses_resolution(cle: str) -> Tuple[Candidat, ...]:
    try:
        origine = _verifier_origine([int(v) for v in cle.split()])
    except ValueError:
        return ()
    reponses = [(f"Answer: {solution[1:-1]} = 24", 2.0) for solution in sorted(resoudre_oracle(origine))]
    # Leurre : n'utilise que deux nombres
    reponses.append((f"Answer: {origine[0]} + {origine[1]} = 24", 1.0))
    return tuple(reponses)


def politique_resolution() -> PolitiqueScriptee:
    """
    Coups qui gardent l'état soluble au poids 2.0, autres coups légaux au
    poids 1.0 ; labels de valeur orientés vers la vérité
    """
    politique = PolitiqueScriptee("jeu24-resolution")
    politique.ajouter_fournisseur("game24", "propose", lambda cle: list(_propositions_resolution(cle)))
    politique.ajouter_fournisseur("game24", "value", _valeurs_resolution)
    politique.ajouter_fournisseur("game24", "write", lambda cle: list(_reponses_resolution(cle)))
    return politique


def politique_trois_chemins() -> PolitiqueScriptee:
    """Instance 1 2 3 4 avec trois chemins de solution de poids 2.0, 1.9 et 1.8"""
    politique = PolitiqueScriptee("jeu24-trois-chemins")
    regles = {
        "1 2 3 4": [("1 * 2 = 2 (left: 2 3 4)", 2.0),
                    ("1 + 2 = 3 (left: 3 3 4)", 1.9),
                    ("2 + 4 = 6 (left: 1 3 6)", 1.8)],
        "2 3 4": [("2 * 3 = 6 (left: 4 6)", 1.0)],
        "3 3 4": [("3 + 3 = 6 (left: 4 6)", 1.0)],
        "1 3 6": [("1 + 3 = 4 (left: 4 6)", 1.0)],
        "4 6": [("4 * 6 = 24 (left: 24)", 1.0)],
    }
    for cle, candidats in regles.items():
        politique.ajouter_regle(RegleScriptee("game24", "propose", cle, candidats))
    politique.ajouter_regle(RegleScriptee("game24", "value", "*", [("sure", 1.0)]))
    return politique
