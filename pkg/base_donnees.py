"""
Module base_donnees.py
Gère le stockage et la lecture des enregistrements de runs dans un fichier JSON
(un enregistrement par run, sérialisation canonique pour la relecture)
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)

COLONNES_RESUME = ("identifiant", "tache", "methode", "instance", "repetition", "complet",
                   "reponse", "verifie", "score", "tokens_prompt", "tokens_generation")


def serialiser(donnees: Any) -> str:
    """Sérialisation canonique (clés triées) utilisée pour le stockage et la comparaison"""
    return json.dumps(donnees, sort_keys=True, ensure_ascii=False, indent=2)


class BaseEnregistrements:
    """Gère le stockage des enregistrements de runs dans un fichier JSON"""

    def __init__(self, nom_fichier: str = "enregistrements.json"):
        """
        Initialise la base

        Args:
            nom_fichier: Nom du fichier JSON (chemin relatif ou absolu)
        """
        self.chemin_fichier = Path(nom_fichier)
        self.initialiser_fichier()

    def initialiser_fichier(self) -> None:
        """Crée le fichier JSON (et son dossier) s'il n'existe pas"""
        if not self.chemin_fichier.exists():
            self.chemin_fichier.parent.mkdir(parents=True, exist_ok=True)
            self.sauvegarder([])

    def sauvegarder(self, donnees: List[Dict[str, Any]]) -> None:
        """
        Sauvegarde les enregistrements dans le fichier JSON

        Raises:
            IOError: Si l'écriture échoue
        """
        try:
            with open(self.chemin_fichier, "w", encoding="utf-8") as f:
                f.write(serialiser(donnees))
                f.write("\n")
        except IOError as e:
            raise IOError(f"Erreur lors de la sauvegarde : {e}")

    def charger(self) -> List[Dict[str, Any]]:
        """
        Charge les enregistrements depuis le fichier JSON

        Raises:
            IOError: Si le fichier est illisible ou n'est pas du JSON
        """
        try:
            with open(self.chemin_fichier, "r", encoding="utf-8") as f:
                donnees = json.load(f)
                return donnees if isinstance(donnees, list) else []
        except (IOError, json.JSONDecodeError) as e:
            raise IOError(f"Erreur lors de la lecture : {e}")

    def inserer(self, enregistrement: Dict[str, Any], remplacer: bool = False) -> None:
        """
        Insère un enregistrement

        Args:
            enregistrement: Dictionnaire avec au moins une clé "identifiant"
            remplacer: Remplace l'enregistrement de même identifiant s'il existe

        Raises:
            ValueError: Si l'identifiant existe déjà et que remplacer est faux
        """
        self.inserer_multiple([enregistrement], remplacer)

    def inserer_multiple(self, enregistrements: List[Dict[str, Any]], remplacer: bool = False) -> None:
        """
        Insère plusieurs enregistrements en une seule écriture

        Raises:
            ValueError: Si un identifiant existe déjà et que remplacer est faux
        """
        donnees = self.charger()
        index = {d.get("identifiant"): i for i, d in enumerate(donnees)}
        for enregistrement in enregistrements:
            identifiant = enregistrement.get("identifiant")
            if identifiant is None:
                raise ValueError("Un enregistrement doit avoir un identifiant")
            if identifiant in index:
                if not remplacer:
                    raise ValueError(f"Un enregistrement avec l'identifiant {identifiant} existe déjà")
                donnees[index[identifiant]] = enregistrement
            else:
                index[identifiant] = len(donnees)
                donnees.append(enregistrement)
        self.sauvegarder(donnees)

    def obtenir_tous(self) -> List[Dict[str, Any]]:
        return self.charger()

    def obtenir_par_id(self, identifiant: str) -> Dict[str, Any]:
        """
        Récupère un enregistrement par son identifiant

        Raises:
            KeyError: Si l'enregistrement n'existe pas
        """
        for enregistrement in self.charger():
            if enregistrement.get("identifiant") == identifiant:
                return enregistrement
        raise KeyError(f"Enregistrement {identifiant} non trouvé")

    def filtrer(self, tache: Optional[str] = None, methode: Optional[str] = None) -> List[Dict[str, Any]]:
        """
        Récupère les enregistrements correspondant à tous les critères fournis

        Args:
            tache: game24 ou creative-writing
            methode: io, cot, tot, tot-random ou t2ot
        """
        criteres = {"tache": tache, "methode": methode}
        return [d for d in self.charger()
                if all(valeur is None or d.get(cle) == valeur for cle, valeur in criteres.items())]

    def statistiques(self) -> Dict[str, Any]:
        """
        Comptes rapides sur les enregistrements

        Returns:
            Dictionnaire avec le nombre de runs, de runs complets et de réponses vérifiées
        """
        donnees = self.charger()
        return {
            "count": len(donnees),
            "complets": sum(1 for d in donnees if d.get("complet")),
            "verifies": sum(1 for d in donnees if d.get("verdict", {}).get("verifie")),
        }

    def supprimer_tous(self) -> None:
        """Vide complètement la base"""
        self.sauvegarder([])

    def compter(self) -> int:
        return len(self.charger())

    def exporter_csv(self, nom_fichier: str = "enregistrements.csv") -> int:
        """
        Exporte une ligne de résumé par enregistrement

        Returns:
            Nombre de lignes écrites

        Raises:
            IOError: Si l'écriture échoue
        """
        donnees = self.charger()
        if not donnees:
            logger.info("Aucune donnée à exporter")
            return 0
        try:
            with open(nom_fichier, "w", newline="", encoding="utf-8") as f:
                writer = csv.DictWriter(f, fieldnames=COLONNES_RESUME)
                writer.writeheader()
                writer.writerows(resumer(d) for d in donnees)
            logger.info("%d enregistrements exportés vers %s", len(donnees), nom_fichier)
        except IOError as e:
            raise IOError(f"Erreur lors de l'export CSV : {e}")
        return len(donnees)

    def __repr__(self) -> str:
        return f"BaseEnregistrements(fichier={self.chemin_fichier}, enregistrements={self.compter()})"


def resumer(enregistrement: Dict[str, Any]) -> Dict[str, Any]:
    """Ligne de résumé d'un enregistrement pour l'export CSV"""
    verdict = enregistrement.get("verdict", {})
    total = enregistrement.get("usage", {}).get("total", {})
    return {
        "identifiant": enregistrement.get("identifiant"),
        "tache": enregistrement.get("tache"),
        "methode": enregistrement.get("methode"),
        "instance": enregistrement.get("instance"),
        "repetition": enregistrement.get("repetition"),
        "complet": enregistrement.get("complet"),
        "reponse": verdict.get("reponse"),
        "verifie": verdict.get("verifie"),
        "score": verdict.get("score"),
        "tokens_prompt": total.get("prompt", 0),
        "tokens_generation": total.get("generation", 0),
    }
