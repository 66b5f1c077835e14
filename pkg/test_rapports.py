"""
Module test_rapports.py
Tests unitaires pour la génération des rapports
"""

import json

import pytest

from ecriture_creative import SENTINELLE_JUGE
from modeles import TableTarifs
from rapports import (
    GenerateurRapports,
    ecrire_rapport,
    est_verifie,
    formater_frequences,
    formater_moyenne_ecart,
    formater_pourcentage,
    registre_coherent,
    rendre_texte,
    score_coherence,
)


def usage(prompt, generation, estimes=0):
    return {"par_phase": {"propose": {"prompt": prompt, "generation": generation, "appels": 1,
                                      "appels_estimes": estimes}},
            "total": {"prompt": prompt, "generation": generation, "appels": 1, "appels_estimes": estimes}}


def run_jeu24(identifiant, methode, reponse, origine=(4, 9, 10, 13), verdict=None, compteurs=None, complet=True):
    return {
        "identifiant": identifiant,
        "tache": "game24",
        "methode": methode,
        "instance": " ".join(map(str, origine)),
        "entree": {"origine": list(origine)},
        "transcription": {"reponse": reponse, "arbres": [], "compteurs": compteurs or {}, "complet": complet},
        "verdict": verdict if verdict is not None else {"verifie": None},
        "usage": usage(1600, 5500),
    }


def run_ecriture(identifiant, methode, sortie_juge):
    appel = {"phase": "judge", "sorties": [sortie_juge]}
    return {
        "identifiant": identifiant,
        "tache": "creative-writing",
        "methode": methode,
        "instance": "cw-001",
        "transcription": {"arbres": [{"etapes": [{"type": "passage", "appels": [appel]}]}], "arbre_choisi": 0,
                          "compteurs": {}},
        "usage": usage(4000, 2000),
    }


BONNE = "(10-4)*(13-9)"


@pytest.fixture
def generateur():
    return GenerateurRapports()


class TestFormats:
    """Tests pour les formats d'affichage"""

    def test_pourcentage(self):
        assert formater_pourcentage(0.8) == "80.0%"
        assert formater_pourcentage(0.0) == "0.0%"

    def test_frequences(self):
        assert formater_frequences([1.0]) == "(1.0)"
        assert formater_frequences([0.5, 0.3, 0.2]) == "(0.5, 0.3, 0.2)"

    def test_moyenne_ecart(self):
        assert formater_moyenne_ecart(70, 10) == "70.00 ± 10.00"


class TestRapportSucces:
    """Tests pour le taux de succès"""

    def test_quatre_sur_cinq(self, generateur):
        runs = [run_jeu24(f"r{i}", "tot", BONNE) for i in range(4)] + [run_jeu24("r4", "tot", "4+9+10+13")]
        tableau = generateur.rapport_succes(runs)
        assert tableau["tot"]["affichage"] == "80.0%"
        assert tableau["tot"]["verifies"] == 4

    def test_aucun_succes(self, generateur):
        runs = [run_jeu24("r0", "io", None), run_jeu24("r1", "io", "13+9+4-10")]
        assert generateur.rapport_succes(runs)["io"]["affichage"] == "0.0%"

    def test_verdict_stocke_ignore(self, generateur):
        """Un verdict stocké faux ne change pas le taux recalculé"""
        runs = [run_jeu24("r0", "t2ot", "4*9", verdict={"verifie": True})]
        assert not est_verifie(runs[0])
        assert generateur.rapport_succes(runs)["t2ot"]["taux"] == 0.0

    def test_ordre_des_methodes(self, generateur):
        runs = [run_jeu24("a", "t2ot", BONNE), run_jeu24("b", "io", BONNE), run_jeu24("c", "tot", BONNE)]
        assert list(generateur.rapport_succes(runs)) == ["io", "tot", "t2ot"]


class TestRapportDiversite:
    """Tests pour la diversité des solutions"""

    def test_un_seul_type(self, generateur):
        runs = [run_jeu24(f"r{i}", "tot", BONNE) for i in range(3)]
        tableau = generateur.rapport_diversite(runs, "4 9 10 13")
        assert tableau["tot"]["affichage"] == "(1.0)"

    def test_types_et_echecs(self, generateur):
        runs = [
            run_jeu24("r0", "t2ot", BONNE),
            run_jeu24("r1", "t2ot", "(13-9)*(10-4)"),
            run_jeu24("r2", "t2ot", "(10-4)*(13-9)"),
            run_jeu24("r3", "t2ot", None),
        ]
        ligne = generateur.rapport_diversite(runs, "4 9 10 13")["t2ot"]
        assert ligne["frequences"] == [0.75]
        assert ligne["echecs"] == 1
        assert ligne["types"][0]["nombre"] == 3

    def test_instance_absente(self, generateur):
        assert generateur.rapport_diversite([run_jeu24("r0", "tot", BONNE)], "1 1 1 1") == {}


class TestRapportScores:
    """Tests pour les scores de cohérence"""

    def test_moyenne_ecart(self, generateur):
        runs = [run_ecriture("c0", "t2ot", SENTINELLE_JUGE.format(s=60)),
                run_ecriture("c1", "t2ot", SENTINELLE_JUGE.format(s=80))]
        ligne = generateur.rapport_scores(runs)["t2ot"]
        assert ligne["moyenne"] == 70
        assert ligne["affichage"] == "70.00 ± 14.14"

    def test_un_seul_score(self, generateur):
        ligne = generateur.rapport_scores([run_ecriture("c0", "tot", SENTINELLE_JUGE.format(s=65))])["tot"]
        assert ligne["ecart_type"] == 0.0
        assert ligne["ecart_degenere"]

    def test_score_relu_depuis_la_sortie_brute(self):
        assert score_coherence(run_ecriture("c0", "io", "Nice. Thus, the coherency score is 120")) == 100
        assert score_coherence(run_ecriture("c0", "io", "No verdict.")) == 50

    def test_sans_jugement(self):
        assert score_coherence({"transcription": {"arbres": []}}) is None

    def test_jugement_du_plan_ignore(self):
        appel = {"phase": "judge", "sorties": [SENTINELLE_JUGE.format(s=61)]}
        etapes = [{"type": "plan", "appels": [appel]}, {"type": "passage", "avorte": True, "appels": []}]
        run = {"transcription": {"arbres": [{"etapes": etapes}], "arbre_choisi": 0}}
        assert score_coherence(run) is None

    def test_run_incomplet(self):
        run = run_ecriture("c0", "t2ot", SENTINELLE_JUGE.format(s=70))
        assert score_coherence(run) == 70
        run["transcription"]["complet"] = False
        assert score_coherence(run) is None

    def test_reference_jugee(self):
        run = run_ecriture("c0", "cot", SENTINELLE_JUGE.format(s=55))
        run["transcription"]["arbres"][0]["etapes"][0]["type"] = "reference"
        assert score_coherence(run) == 55


class TestRapportCout:
    """Tests pour les coûts"""

    def test_affichage_kilo(self, generateur):
        ligne = generateur.rapport_cout([run_jeu24("r0", "tot", BONNE)])["game24/tot"]
        assert ligne["affichage"] == "5.5k / 1.6k"
        assert ligne["coherent"]

    def test_cout_recalcule(self):
        generateur = GenerateurRapports(TableTarifs(prix_prompt_1k=1.0, prix_generation_1k=2.0))
        ligne = generateur.rapport_cout([run_jeu24("r0", "tot", BONNE)])["game24/tot"]
        assert ligne["cout"] == pytest.approx(1.6 + 11.0)

    def test_registre_incoherent(self):
        faux = usage(100, 10)
        faux["total"]["prompt"] = 999
        assert not registre_coherent(faux)


class TestGenerer:
    """Tests pour le bundle complet et son écriture"""

    @pytest.fixture
    def enregistrements(self):
        return [
            run_jeu24("r0", "tot", BONNE, compteurs={"valeurs_repli": 2}),
            run_jeu24("r1", "tot", None, compteurs={"valeurs_repli": 1, "propositions_rejetees.format": 3},
                      complet=False),
            run_ecriture("c0", "t2ot", SENTINELLE_JUGE.format(s=70)),
        ]

    def test_compteurs(self, generateur, enregistrements):
        compteurs = generateur.compteurs(enregistrements)
        assert compteurs["runs"] == 3
        assert compteurs["runs_incomplets"] == 1
        assert compteurs["valeurs_repli"] == 3
        assert compteurs["propositions_rejetees.format"] == 3

    def test_bundle(self, generateur, enregistrements):
        bundle = generateur.generer(enregistrements)
        assert set(bundle) == {"succes", "diversite", "scores", "cout", "compteurs", "notes", "tarifs"}
        assert list(bundle["diversite"]) == ["4 9 10 13"]
        assert bundle["succes"]["tot"]["affichage"] == "50.0%"
        assert len(bundle["notes"]) == 2

    def test_texte(self, generateur, enregistrements):
        texte = rendre_texte(generateur.generer(enregistrements))
        assert "50.0%" in texte
        assert "runs_incomplets" in texte

    def test_ecrire(self, generateur, enregistrements, tmp_path):
        bundle = generateur.generer(enregistrements)
        chemins = ecrire_rapport(bundle, str(tmp_path / "rapport"))
        noms = {chemin.name for chemin in chemins}
        assert {"rapport.json", "rapport.txt", "succes.csv", "scores.csv", "cout.csv", "diversite.csv"} <= noms
        relu = json.loads((tmp_path / "rapport" / "rapport.json").read_text(encoding="utf-8"))
        assert relu["compteurs"]["runs"] == 3

    def test_afficher(self, generateur, enregistrements, capsys):
        generateur.afficher_rapport(generateur.generer(enregistrements))
        assert "RAPPORT D'EXPÉRIENCE" in capsys.readouterr().out
