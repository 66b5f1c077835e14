"""
Module test_gestionnaire.py
Tests unitaires pour le gestionnaire d'essaim
"""

import pytest

from arbre import Arbre
from controleur_temperature import ControleurPSO, ParametresPSO
from gestionnaire import GestionnaireEssaim


class ArbreScripte(Arbre):
    """Arbre dont les évaluations x sont données à l'avance"""

    def __init__(self, index, valeurs, profondeur_max=3, panne_a=None):
        super().__init__(index, ControleurPSO(ParametresPSO()), index, profondeur_max)
        self.valeurs = list(valeurs)
        self.panne_a = panne_a
        self.gb_recus = []

    def executer_etape(self, meilleur_global):
        if not self.actif():
            return
        self.gb_recus.append(meilleur_global)
        numero = len(self.etapes) + 1
        etape = {"etape": numero, "temperature": self.temperature}
        if numero == self.panne_a:
            self.avorter(RuntimeError("panne"), etape)
            return
        self.etapes.append(etape)
        etape.update(self.cloturer_etape(self.valeurs[numero - 1], meilleur_global))


class TestGestionnaireEssaim:
    """Tests pour la classe GestionnaireEssaim"""

    @pytest.fixture
    def gestionnaire(self):
        return GestionnaireEssaim()

    def test_initialisation(self, gestionnaire):
        assert gestionnaire.obtenir_nombre_arbres() == 0
        assert gestionnaire.meilleur_global is None
        assert gestionnaire.obtenir_historique() == []

    def test_parallelisme_invalide(self):
        with pytest.raises(ValueError):
            GestionnaireEssaim(parallelisme=0)

    def test_ajouter_arbre(self, gestionnaire):
        gestionnaire.ajouter_arbre(ArbreScripte(0, [0.5]))
        assert gestionnaire.obtenir_nombre_arbres() == 1

    def test_ajouter_arbre_duplique(self, gestionnaire):
        gestionnaire.ajouter_arbre(ArbreScripte(0, [0.5]))
        with pytest.raises(ValueError):
            gestionnaire.ajouter_arbre(ArbreScripte(0, [0.9]))

    def test_executer_sans_arbre(self, gestionnaire):
        with pytest.raises(ValueError):
            gestionnaire.executer(2)

    def test_profondeur_invalide(self, gestionnaire):
        gestionnaire.ajouter_arbre(ArbreScripte(0, [0.5]))
        with pytest.raises(ValueError):
            gestionnaire.executer(0)

    def test_gb_de_la_barriere_precedente(self, gestionnaire):
        a = ArbreScripte(0, [0.2, 0.9, 0.1])
        b = ArbreScripte(1, [0.6, 0.3, 0.4])
        gestionnaire.ajouter_arbre(a)
        gestionnaire.ajouter_arbre(b)
        assert gestionnaire.executer(3) == 0.9
        # Les deux arbres voient le même gb, jamais celui de l'étape en cours
        assert a.gb_recus == [None, 0.6, 0.9]
        assert b.gb_recus == [None, 0.6, 0.9]
        assert [e["meilleur_global"] for e in gestionnaire.obtenir_historique()] == [0.6, 0.9, 0.9]
        assert [e["gb_consomme"] for e in gestionnaire.obtenir_historique()] == [None, 0.6, 0.9]

    def test_meilleur_global_monotone(self, gestionnaire):
        gestionnaire.ajouter_arbre(ArbreScripte(0, [0.9, 0.1, 0.2]))
        gestionnaire.executer(3)
        globaux = [e["meilleur_global"] for e in gestionnaire.obtenir_historique()]
        assert globaux == sorted(globaux)

    def test_arret_quand_plus_aucun_arbre_actif(self, gestionnaire):
        gestionnaire.ajouter_arbre(ArbreScripte(0, [0.5, 0.5], profondeur_max=2))
        gestionnaire.executer(5)
        assert len(gestionnaire.obtenir_historique()) == 2

    def test_panne_isolee(self, gestionnaire):
        a = ArbreScripte(0, [0.2, 0.9, 0.1], panne_a=2)
        b = ArbreScripte(1, [0.6, 0.3, 0.4])
        gestionnaire.ajouter_arbre(a)
        gestionnaire.ajouter_arbre(b)
        gestionnaire.executer(3)
        assert a.avorte
        assert len(a.etapes) == 2
        assert len(b.etapes) == 3
        assert gestionnaire.meilleur_global == 0.6

    def test_parallele_identique_au_sequentiel(self):
        resultats = []
        for parallelisme in (1, 3):
            gestionnaire = GestionnaireEssaim(parallelisme=parallelisme)
            arbres = [ArbreScripte(i, [0.1 * i, 0.3, 0.2 * i]) for i in range(3)]
            for arbre in arbres:
                gestionnaire.ajouter_arbre(arbre)
            gestionnaire.executer(3)
            resultats.append([arbre.to_dict() for arbre in arbres])
        assert resultats[0] == resultats[1]

    def test_temperatures_independantes(self, gestionnaire):
        a = ArbreScripte(0, [0.1, 0.1, 0.1])
        b = ArbreScripte(1, [0.9, 0.9, 0.9])
        gestionnaire.ajouter_arbre(a)
        gestionnaire.ajouter_arbre(b)
        gestionnaire.executer(3)
        assert a.etapes[1]["temperature"] == b.etapes[1]["temperature"] == 0.7
        assert a.etapes[2]["temperature"] > b.etapes[2]["temperature"]
