import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional

from arbre import Arbre
from controleur_temperature import EtatEssaim, mettre_a_jour_meilleur_global

logger = logging.getLogger(__name__)


class GestionnaireEssaim:
    """Fait avancer un ensemble d'arbres en pas synchronisés"""

    def __init__(self, parallelisme: int = 1):
        """
        Initialise le gestionnaire d'essaim

        Args:
            parallelisme: Nombre d'arbres exécutés en même temps entre deux barrières
        """
        if parallelisme < 1:
            raise ValueError(f"parallelisme doit être ≥ 1 (reçu {parallelisme})")
        self.parallelisme = parallelisme
        self.arbres: Dict[int, Arbre] = {}
        self.essaim: Optional[EtatEssaim] = None
        self.historique_barrieres: List[Dict[str, Any]] = []

    def ajouter_arbre(self, arbre: Arbre) -> None:
        """
        Ajoute un arbre au gestionnaire

        Args:
            arbre: Instance d'Arbre à ajouter

        Raises:
            ValueError: Si l'index de l'arbre existe déjà
        """
        if arbre.index in self.arbres:
            raise ValueError(f"Un arbre avec l'index {arbre.index} existe déjà")
        self.arbres[arbre.index] = arbre
        self.essaim = None

    def _preparer_essaim(self) -> EtatEssaim:
        if not self.arbres:
            raise ValueError("Aucun arbre à exécuter")
        if self.essaim is None:
            ordonnes = self._arbres_ordonnes()
            self.essaim = EtatEssaim(len(ordonnes), [a.meilleur_personnel for a in ordonnes])
            mettre_a_jour_meilleur_global(self.essaim)
        return self.essaim

    def _arbres_ordonnes(self) -> List[Arbre]:
        return [self.arbres[index] for index in sorted(self.arbres)]

    @property
    def meilleur_global(self) -> Optional[float]:
        return self.essaim.meilleur_global if self.essaim is not None else None

    def executer_etape_synchronisee(self) -> Optional[float]:
        """
        Fait exécuter une étape à chaque arbre actif, puis passe la barrière

        Tous les arbres consomment le même gb (celui de la barrière précédente).
        Un arbre interrompu n'interrompt pas les autres.

        Returns:
            Le meilleur global après la barrière
        """
        essaim = self._preparer_essaim()
        gb = essaim.meilleur_global
        actifs = [arbre for arbre in self._arbres_ordonnes() if arbre.actif()]
        if self.parallelisme > 1 and len(actifs) > 1:
            with ThreadPoolExecutor(max_workers=self.parallelisme) as executeur:
                list(executeur.map(lambda arbre: arbre.executer_etape(gb), actifs))
        else:
            for arbre in actifs:
                arbre.executer_etape(gb)

        # Barrière : un seul coordinateur met à jour l'état partagé
        ordonnes = self._arbres_ordonnes()
        essaim.meilleurs_personnels = [arbre.meilleur_personnel for arbre in ordonnes]
        mettre_a_jour_meilleur_global(essaim)
        self.historique_barrieres.append({
            "barriere": len(self.historique_barrieres) + 1,
            "gb_consomme": gb,
            "meilleurs_personnels": list(essaim.meilleurs_personnels),
            "meilleur_global": essaim.meilleur_global,
        })
        logger.debug("Barrière %d : gb=%s", len(self.historique_barrieres), essaim.meilleur_global)
        return essaim.meilleur_global

    def executer(self, profondeur: int) -> Optional[float]:
        """
        Exécute jusqu'à `profondeur` étapes synchronisées

        S'arrête plus tôt si plus aucun arbre n'est actif.

        Returns:
            Le meilleur global final
        """
        if profondeur < 1:
            raise ValueError(f"profondeur doit être ≥ 1 (reçu {profondeur})")
        self._preparer_essaim()
        logger.debug("Essaim de %d arbres, profondeur %d", self.obtenir_nombre_arbres(), profondeur)
        for _ in range(profondeur):
            if not any(arbre.actif() for arbre in self.arbres.values()):
                break
            self.executer_etape_synchronisee()
        return self.meilleur_global

    def obtenir_historique(self) -> List[Dict[str, Any]]:
        """Retourne l'historique des barrières"""
        return list(self.historique_barrieres)

    def obtenir_nombre_arbres(self) -> int:
        """Retourne le nombre total d'arbres"""
        return len(self.arbres)

    def __repr__(self) -> str:
        return (f"GestionnaireEssaim(arbres={self.obtenir_nombre_arbres()}, "
                f"barrieres={len(self.historique_barrieres)}, gb={self.meilleur_global})")
