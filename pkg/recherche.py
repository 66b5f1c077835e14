"""
Module recherche.py
Recherche en faisceau (largeur d'abord) sur des pensées générées par un
modèle : développement, évaluation, sélection, puis ajustement de la
température. Contient aussi les références IO et CoT (un seul appel).
"""

import logging
import statistics
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from arbre import Arbre, ConfigRecherche, NoeudPensee, ResultatRecherche, fusionner_compteurs
from controleur_temperature import ControleurTemperature, ParametresPSO, creer_controleur
from gestionnaire import GestionnaireEssaim
from modeles import (
    Backend,
    ErreurBackend,
    RegistreUsage,
    RequeteCompletion,
    ReponseCompletion,
    deriver_graine,
)

logger = logging.getLogger(__name__)

# (contenu affiché, état de la tâche)
Proposition = Tuple[str, Any]


class DefinitionTache:
    """
    Contrat d'une tâche pour le moteur de recherche

    Une instance est liée à une entrée (quatre nombres, quatre phrases...).
    Les analyseurs sont totaux : tout texte produit par le modèle donne des
    candidats ou rien, jamais une exception.
    """

    nom = "tache"

    def etat_initial(self) -> Any:
        raise NotImplementedError

    def cle_etat(self, etat: Any) -> str:
        raise NotImplementedError

    def contenu(self, etat: Any) -> str:
        return self.cle_etat(etat)

    def construire_prompt_proposition(self, etat: Any) -> str:
        raise NotImplementedError

    def construire_prompt_valeur(self, etat: Any) -> str:
        raise NotImplementedError

    def analyser_propositions(self, etat: Any, texte: str) -> Tuple[List[Proposition], List[str]]:
        """Retourne (propositions acceptées, motifs de rejet)"""
        raise NotImplementedError

    def analyser_valeur(self, texte: str) -> Tuple[str, bool]:
        """Retourne (label, vrai si le label de repli a été utilisé)"""
        raise NotImplementedError

    def valeur_vers_score(self, label: str) -> float:
        raise NotImplementedError

    def est_terminal(self, etat: Any) -> bool:
        raise NotImplementedError

    def extraire_reponse(self, etat: Any) -> Optional[str]:
        raise NotImplementedError

    # Références à un seul appel
    def cle_baseline(self) -> str:
        raise NotImplementedError

    def construire_prompt_io(self) -> str:
        raise NotImplementedError

    def construire_prompt_cot(self) -> str:
        raise NotImplementedError

    def extraire_reponse_texte(self, texte: str) -> Optional[str]:
        raise NotImplementedError

    def verifier_reponse(self, reponse: Optional[str]) -> bool:
        raise NotImplementedError

    def creer_arbre(self, index: int, controleur: ControleurTemperature, graine: int,
                    config: ConfigRecherche, backend: Backend, registre: RegistreUsage) -> Arbre:
        """Arbre par défaut : recherche en faisceau"""
        return ArbreRecherche(self, backend, config, index, controleur, graine, registre)


def executer_en_parallele(fonction: Callable[[Any], Any], elements: Sequence[Any], parallelisme: int) -> List[Any]:
    """Applique fonction à chaque élément ; l'ordre des résultats suit celui des éléments"""
    if parallelisme <= 1 or len(elements) <= 1:
        return [fonction(element) for element in elements]
    with ThreadPoolExecutor(max_workers=parallelisme) as executeur:
        return list(executeur.map(fonction, elements))


def decrire_appel(requete: RequeteCompletion, reponse: ReponseCompletion,
                  noeud: Optional[int] = None) -> Dict[str, Any]:
    """Trace d'un appel modèle pour la transcription"""
    return {
        "phase": requete.etiquette,
        "noeud": noeud,
        "prompt": requete.prompt,
        "temperature": requete.temperature,
        "n": requete.nombre_echantillons,
        "graine": requete.graine,
        "sorties": list(reponse.echantillons),
    }


def developper_noeud(noeud: NoeudPensee, tache: DefinitionTache, backend: Backend, temperature: float,
                     propositions: int, graine: int,
                     registre: Optional[RegistreUsage] = None) -> Tuple[List[Proposition], List[str], Dict[str, Any]]:
    """
    Demande des propositions pour un noeud à la température donnée

    Chaque échantillon est découpé en lignes ; chaque ligne est analysée par
    la tâche. Les doublons d'un même parent sont fusionnés et comptés dans
    la trace de l'appel (clé "doublons").

    Args:
        noeud: Noeud à développer (non terminal)
        tache: Définition de la tâche
        backend: Modèle interrogé
        temperature: Température de l'arbre pour cette étape
        propositions: Nombre d'échantillons demandés
        graine: Graine de l'arbre

    Returns:
        (propositions retenues, motifs de rejet, trace de l'appel)

    Raises:
        ErreurBackend: Si l'appel échoue
    """
    requete = RequeteCompletion(
        prompt=tache.construire_prompt_proposition(noeud.etat),
        temperature=temperature,
        nombre_echantillons=propositions,
        etiquette="propose",
        graine=deriver_graine(graine, noeud.identifiant, "propose", 0),
        tache=tache.nom,
        cle_etat=tache.cle_etat(noeud.etat),
    )
    reponse = backend.completer(requete, registre)
    retenues: List[Proposition] = []
    vus = set()
    rejets: List[str] = []
    doublons = 0
    for texte in reponse.echantillons:
        acceptees, motifs = tache.analyser_propositions(noeud.etat, texte)
        rejets.extend(motifs)
        for contenu, etat in acceptees:
            if contenu in vus:
                doublons += 1
                continue
            vus.add(contenu)
            retenues.append((contenu, etat))
    if rejets:
        logger.debug("Noeud %d : %d proposition(s) rejetée(s)", noeud.identifiant, len(rejets))
    appel = decrire_appel(requete, reponse, noeud.identifiant)
    appel["doublons"] = doublons
    return retenues, rejets, appel


def evaluer_candidats(noeuds: List[NoeudPensee], tache: DefinitionTache, backend: Backend,
                      echantillons: int, temperature: float, graine: int,
                      registre: Optional[RegistreUsage] = None,
                      parallelisme: int = 1) -> Tuple[List[float], int, List[Dict[str, Any]]]:
    """
    Évalue chaque noeud par la moyenne de k échantillons de valeur

    Chaque échantillon est un appel séparé (k appels par noeud). Les valeurs
    sont aussi écrites dans les noeuds.

    Returns:
        (valeurs x, nombre d'échantillons en repli, traces des appels)

    Raises:
        ValueError: Si echantillons < 1
        ErreurBackend: Si un appel échoue
    """
    if echantillons < 1:
        raise ValueError(f"Le nombre d'échantillons de valeur doit être ≥ 1 (reçu {echantillons})")
    taches = [(noeud, indice) for noeud in noeuds for indice in range(echantillons)]

    def appeler(couple: Tuple[NoeudPensee, int]) -> Tuple[RequeteCompletion, ReponseCompletion]:
        noeud, indice = couple
        requete = RequeteCompletion(
            prompt=tache.construire_prompt_valeur(noeud.etat),
            temperature=temperature,
            etiquette="value",
            graine=deriver_graine(graine, noeud.identifiant, "value", indice),
            tache=tache.nom,
            cle_etat=tache.cle_etat(noeud.etat),
        )
        return requete, backend.completer(requete, registre)

    resultats = executer_en_parallele(appeler, taches, parallelisme)
    replis = 0
    appels = []
    scores: Dict[int, List[float]] = {noeud.identifiant: [] for noeud in noeuds}
    for (noeud, _), (requete, reponse) in zip(taches, resultats):
        appels.append(decrire_appel(requete, reponse, noeud.identifiant))
        texte = reponse.echantillons[0] if reponse.echantillons else ""
        label, repli = tache.analyser_valeur(texte)
        replis += int(repli)
        noeud.echantillons_valeur.append(label)
        scores[noeud.identifiant].append(tache.valeur_vers_score(label))
    valeurs = []
    for noeud in noeuds:
        noeud.valeur = statistics.mean(scores[noeud.identifiant])
        valeurs.append(noeud.valeur)
    return valeurs, replis, appels


def selectionner_faisceau(noeuds: List[NoeudPensee], largeur: int) -> List[NoeudPensee]:
    """
    Garde les `largeur` noeuds de plus forte valeur (égalité : plus petit id)

    Raises:
        ValueError: Si largeur < 1 ou si un noeud n'a pas été évalué
    """
    if largeur < 1:
        raise ValueError(f"La largeur de faisceau doit être ≥ 1 (reçu {largeur})")
    if any(noeud.valeur is None for noeud in noeuds):
        raise ValueError("Tous les noeuds doivent être évalués avant la sélection")
    return sorted(noeuds, key=lambda n: (-n.valeur, n.identifiant))[:largeur]


def agreger(valeurs: List[float], mode: str) -> float:
    """x de l'étape à partir des valeurs du faisceau"""
    if mode == "max":
        return max(valeurs)
    if mode == "mean":
        return statistics.mean(valeurs)
    raise ValueError(f"Agrégation inconnue : {mode}")


class ArbreRecherche(Arbre):
    """Arbre de recherche en faisceau : développer → évaluer → sélectionner → ajuster"""

    def __init__(self, tache: DefinitionTache, backend: Backend, config: ConfigRecherche, index: int,
                 controleur: ControleurTemperature, graine: int, registre: Optional[RegistreUsage] = None):
        super().__init__(index, controleur, graine, config.profondeur_max, registre)
        self.tache = tache
        self.backend = backend
        self.config = config
        racine_etat = tache.etat_initial()
        self.racine = NoeudPensee(0, None, 0, tache.contenu(racine_etat), self.temperature, etat=racine_etat)
        self.faisceau: List[NoeudPensee] = [self.racine]
        self._prochain_id = 1

    def executer_etape(self, meilleur_global: Optional[float]) -> None:
        """
        Exécute une étape complète à la température courante de l'arbre

        Args:
            meilleur_global: gb issu de la barrière précédente (None au départ)
        """
        if not self.actif():
            return
        a_developper = sorted((n for n in self.faisceau if not self.tache.est_terminal(n.etat)),
                              key=lambda n: n.identifiant)
        if not a_developper:
            self.epuise = True
            return

        temperature = self.temperature
        self.trajectoire.append(temperature)
        etape: Dict[str, Any] = {"etape": len(self.etapes) + 1, "temperature": temperature, "appels": []}
        try:
            expansions = executer_en_parallele(
                lambda noeud: developper_noeud(noeud, self.tache, self.backend, temperature,
                                               self.config.propositions_par_noeud, self.graine, self.registre),
                a_developper, self.config.parallelisme)
            enfants = []
            for parent, (propositions, rejets, appel) in zip(a_developper, expansions):
                etape["appels"].append(appel)
                for motif in rejets:
                    self.compter(f"propositions_rejetees.{motif}")
                self.compter("propositions_dupliquees", appel["doublons"])
                for contenu, etat in propositions:
                    enfants.append(NoeudPensee(self._prochain_id, parent.identifiant, parent.profondeur + 1,
                                               contenu, temperature, etat=etat))
                    self._prochain_id += 1
            _, replis, appels_valeur = evaluer_candidats(
                enfants, self.tache, self.backend, self.config.echantillons_valeur,
                self.config.temperature_evaluation, self.graine, self.registre, self.config.parallelisme)
        except ErreurBackend as e:
            self.avorter(e, etape)
            return

        etape["appels"].extend(appels_valeur)
        self.compter("valeurs_repli", replis)
        faisceau = selectionner_faisceau(enfants, self.config.largeur_faisceau)
        etape["candidats"] = [noeud.to_dict() for noeud in enfants]
        etape["faisceau"] = [noeud.identifiant for noeud in faisceau]
        self.etapes.append(etape)
        if not faisceau:
            logger.info("Arbre %d épuisé à l'étape %d", self.index, etape["etape"])
            self.epuise = True
            etape["x"] = None
            return
        self.faisceau = faisceau
        x = agreger([noeud.valeur for noeud in faisceau], self.config.agregation)
        etape.update(self.cloturer_etape(x, meilleur_global))

    def _noeuds_avec_reponse(self) -> List[Tuple[NoeudPensee, str]]:
        trouves = []
        for noeud in sorted(self.faisceau, key=lambda n: (-(n.valeur or 0.0), n.identifiant)):
            reponse = self.tache.extraire_reponse(noeud.etat)
            if reponse is not None:
                trouves.append((noeud, reponse))
        return trouves

    def reponse(self) -> Optional[str]:
        """Réponse extraite du meilleur noeud final qui en porte une"""
        trouves = self._noeuds_avec_reponse()
        return trouves[0][1] if trouves else None

    def score_reponse(self) -> float:
        trouves = self._noeuds_avec_reponse()
        return float(trouves[0][0].valeur or 0.0) if trouves else float("-inf")

    def noeuds_finaux(self) -> List[Dict[str, Any]]:
        return [noeud.to_dict() for noeud in self.faisceau if noeud.profondeur > 0]


def assembler_resultat(arbres: List[Arbre], registre: RegistreUsage) -> ResultatRecherche:
    """Regroupe les transcriptions des arbres et choisit la réponse finale"""
    choisi = sorted(arbres, key=lambda a: (a.reponse() is None, -a.score_reponse(), a.index))[0]
    compteurs: Dict[str, int] = {}
    for arbre in arbres:
        fusionner_compteurs(compteurs, arbre.compteurs)
    finaux = choisi.noeuds_finaux()
    return ResultatRecherche(
        arbres=[arbre.to_dict() for arbre in arbres],
        reponse=choisi.reponse(),
        arbre_choisi=choisi.index,
        noeuds_finaux=finaux,
        complet=not any(arbre.avorte for arbre in arbres),
        erreurs=[arbre.erreur for arbre in arbres if arbre.erreur],
        compteurs=compteurs,
        usage=registre.to_dict(),
    )


def _executer_arbres(arbres: List[Arbre], config: ConfigRecherche, registre: RegistreUsage) -> ResultatRecherche:
    gestionnaire = GestionnaireEssaim(parallelisme=config.parallelisme)
    for arbre in arbres:
        gestionnaire.ajouter_arbre(arbre)
    gestionnaire.executer(max(arbre.profondeur_max for arbre in arbres))
    resultat = assembler_resultat(arbres, registre)
    resultat.barrieres = gestionnaire.obtenir_historique()
    return resultat


def executer_recherche(tache: DefinitionTache, backend: Backend, controleur: ControleurTemperature,
                       config: ConfigRecherche, registre: Optional[RegistreUsage] = None) -> ResultatRecherche:
    """
    Exécute la recherche sur un seul arbre

    Args:
        tache: Définition de la tâche liée à une instance
        backend: Modèle interrogé
        controleur: Contrôleur de température de l'arbre
        config: Paramètres de recherche
        registre: Comptabilité des tokens (créée si absente)

    Returns:
        ResultatRecherche, complet=False si un appel a échoué
    """
    registre = registre if registre is not None else RegistreUsage()
    arbre = tache.creer_arbre(0, controleur, config.graine, config, backend, registre)
    return _executer_arbres([arbre], config, registre)


def executer_essaim(tache: DefinitionTache, backend: Backend, params: ParametresPSO, config: ConfigRecherche,
                    plage_aleatoire: Tuple[float, float] = (0.0, 1.0),
                    registre: Optional[RegistreUsage] = None) -> ResultatRecherche:
    """
    Exécute config.nombre_arbres arbres en pas synchronisés

    Chaque arbre reçoit la graine config.graine + index et son propre
    contrôleur ; le meilleur global est recalculé à chaque barrière.
    """
    registre = registre if registre is not None else RegistreUsage()
    arbres = []
    for index in range(config.nombre_arbres):
        graine = config.graine + index
        controleur = creer_controleur(config.methode, params, graine, plage_aleatoire)
        arbres.append(tache.creer_arbre(index, controleur, graine, config, backend, registre))
    return _executer_arbres(arbres, config, registre)


def executer_baseline(tache: DefinitionTache, backend: Backend, config: ConfigRecherche, temperature: float,
                      mode: str = "io", registre: Optional[RegistreUsage] = None) -> ResultatRecherche:
    """
    Référence à un seul appel de génération (IO ou CoT), sans contrôleur

    Avec echantillons_baseline > 1, le premier échantillon dont la réponse
    se vérifie est retenu, sinon la première réponse extraite.

    Raises:
        ValueError: Si le mode n'est ni io ni cot
    """
    if mode not in ("io", "cot"):
        raise ValueError(f"Mode de référence inconnu : {mode}")
    registre = registre if registre is not None else RegistreUsage()
    prompt = tache.construire_prompt_io() if mode == "io" else tache.construire_prompt_cot()
    requete = RequeteCompletion(
        prompt=prompt,
        temperature=temperature,
        nombre_echantillons=config.echantillons_baseline,
        etiquette="write",
        graine=deriver_graine(config.graine, 0, "write", 0),
        tache=tache.nom,
        cle_etat=tache.cle_baseline(),
    )
    etape: Dict[str, Any] = {"etape": 1, "temperature": temperature, "appels": []}
    arbre = {"index": 0, "graine": config.graine, "etapes": [etape], "trajectoire": [temperature],
             "historique": [], "meilleur_personnel": None, "epuise": False, "avorte": False,
             "erreur": None, "compteurs": {}, "reponse": None}
    try:
        reponse = backend.completer(requete, registre)
    except ErreurBackend as e:
        logger.warning("Référence %s interrompue : %s", mode, e)
        etape["avorte"] = True
        arbre.update(avorte=True, erreur=str(e))
        return ResultatRecherche(arbres=[arbre], complet=False, erreurs=[str(e)], usage=registre.to_dict())

    etape["appels"].append(decrire_appel(requete, reponse))
    reponses = [tache.extraire_reponse_texte(texte) for texte in reponse.echantillons]
    etape["reponses"] = reponses
    compteurs = {}
    sans_reponse = sum(1 for r in reponses if r is None)
    if sans_reponse:
        compteurs["reponses_introuvables"] = sans_reponse
    candidates = [r for r in reponses if r is not None]
    choisie = next((r for r in candidates if tache.verifier_reponse(r)), candidates[0] if candidates else None)
    arbre.update(compteurs=compteurs, reponse=choisie)
    return ResultatRecherche(arbres=[arbre], reponse=choisie, compteurs=compteurs, usage=registre.to_dict())


def executer_io(tache: DefinitionTache, backend: Backend, config: ConfigRecherche, temperature: float,
                registre: Optional[RegistreUsage] = None) -> ResultatRecherche:
    return executer_baseline(tache, backend, config, temperature, "io", registre)


def executer_cot(tache: DefinitionTache, backend: Backend, config: ConfigRecherche, temperature: float,
                 registre: Optional[RegistreUsage] = None) -> ResultatRecherche:
    return executer_baseline(tache, backend, config, temperature, "cot", registre)
