"""
Module test_experience.py
Tests d'intégration : configuration, lots de runs, enregistrements et relecture
"""

import json
from dataclasses import replace
from pathlib import Path

import httpx
import pytest

from arbre import ConfigRecherche
from base_donnees import BaseEnregistrements, serialiser
from ecriture_creative import ConfigEcriture
from experience import (
    IDENTIQUE,
    PRESETS,
    ConfigBackend,
    ConfigExperience,
    charger_config,
    charger_entrees,
    config_preset,
    construire_politique,
    empreinte_config,
    executer_experience,
    fusionner,
    graine_run,
    rejouer,
    sans_temps,
)
from jeu24 import politique_resolution
from modeles import Backend, ClientHTTP, ErreurBackend, ModeleSimule

FIXTURES = Path(__file__).parent / "fixtures"


class BackendCompteur(Backend):
    """Compte les appels ; échoue sur chacun, ou sur une seule phase, si demandé"""

    identifiant = "compteur"

    def __init__(self, echouer=False, phase=None, politique=None):
        self.modele = ModeleSimule(politique or politique_resolution())
        self.echouer = echouer
        self.phase = phase
        self.appels = 0

    def _executer(self, requete):
        self.appels += 1
        if self.echouer:
            raise ErreurBackend("rate-limit", "quota épuisé")
        if requete.etiquette == self.phase:
            raise ErreurBackend("timeout", f"pas de réponse en phase {self.phase}")
        return self.modele._executer(requete)


def config_jeu24(sortie, **options):
    valeurs = {
        "tache": "game24",
        "methode": "t2ot",
        "recherche": ConfigRecherche(largeur_faisceau=2, echantillons_valeur=1, propositions_par_noeud=2),
        "taille_jeu_donnees": 2,
        "repetitions": 2,
        "graine": 3,
        "sortie": str(sortie),
    }
    valeurs.update(options)
    return ConfigExperience(**valeurs)


def config_ecriture(sortie, **options):
    valeurs = {
        "tache": "creative-writing",
        "methode": "t2ot",
        "ecriture": ConfigEcriture(plans=3, votes=3),
        "taille_jeu_donnees": 2,
        "sortie": str(sortie),
    }
    valeurs.update(options)
    return replace(config_preset("cw-t2ot"), **valeurs)


class TestConfiguration:
    """Tests pour la configuration d'expérience"""

    def test_preset_jeu24(self):
        config = config_preset("game24-t2ot")
        assert config.pso.acceleration_personnelle == 0.1
        assert config.pso.temperature_initiale == 0.7
        assert config.recherche.profondeur_max == 3
        assert config.recherche.largeur_faisceau == 5
        assert config.recherche.echantillons_valeur == 3

    def test_preset_ecriture(self):
        config = config_preset("cw-t2ot")
        assert config.pso.acceleration_globale == -0.005
        assert config.pso.meilleur_initial == 50.0
        assert config.ecriture.plans == 5
        assert config.ecriture.votes == 5

    def test_preset_inconnu(self):
        with pytest.raises(ValueError):
            config_preset("absent")

    def test_surcharge(self):
        config = config_preset("game24-t2ot", methode="tot", recherche={"largeur_faisceau": 2})
        assert config.recherche.largeur_faisceau == 2
        assert config.recherche.profondeur_max == 3
        assert config.recherche.methode == "tot"

    def test_aller_retour(self):
        config = config_preset("cw-t2ot", graine=4)
        assert ConfigExperience.depuis_dict(config.to_dict()) == config

    def test_cle_inconnue(self):
        with pytest.raises(ValueError):
            ConfigExperience.depuis_dict({"tache": "game24", "vitesse": 3})

    def test_valeurs_invalides(self):
        with pytest.raises(ValueError):
            ConfigExperience(tache="sudoku")
        with pytest.raises(ValueError):
            ConfigExperience(repetitions=0)
        with pytest.raises(ValueError):
            ConfigExperience(plage_aleatoire=(0.8, 0.2))
        with pytest.raises(ValueError):
            ConfigBackend(type="grpc")

    def test_temperature_reference(self):
        assert ConfigExperience(methode="io").temperature_reference == 0.7
        assert ConfigExperience(methode="io", temperature_baseline=0.2).temperature_reference == 0.2

    def test_fusionner(self):
        assert fusionner({"a": {"b": 1, "c": 2}}, {"a": {"c": 3}}) == {"a": {"b": 1, "c": 3}}

    def test_charger_config(self, tmp_path):
        chemin = tmp_path / "config.json"
        chemin.write_text(json.dumps({"preset": "game24-t2ot", "graine": 9, "repetitions": 3}), encoding="utf-8")
        config = charger_config(str(chemin))
        assert config.graine == 9
        assert config.repetitions == 3
        assert config.recherche.largeur_faisceau == PRESETS["game24-t2ot"]["recherche"]["largeur_faisceau"]

    def test_charger_config_invalide(self, tmp_path):
        chemin = tmp_path / "config.json"
        chemin.write_text("{", encoding="utf-8")
        with pytest.raises(IOError):
            charger_config(str(chemin))
        chemin.write_text(json.dumps({"preset": "absent"}), encoding="utf-8")
        with pytest.raises(ValueError):
            charger_config(str(chemin))

    def test_fichiers_du_depot(self):
        racine = Path(__file__).parent / "configs"
        assert charger_config(str(racine / "game24-t2ot.json")).tache == "game24"
        assert charger_config(str(racine / "cw-t2ot.json")).tache == "creative-writing"

    def test_empreinte(self):
        donnees = config_preset("game24-t2ot").to_dict()
        assert empreinte_config(donnees) == empreinte_config(json.loads(json.dumps(donnees)))
        donnees["graine"] = 1
        assert empreinte_config(donnees) != empreinte_config(config_preset("game24-t2ot").to_dict())

    def test_politiques(self):
        assert construire_politique(None, "game24").nom == "jeu24-resolution"
        assert construire_politique(str(FIXTURES / "politique_exemple.json"), "game24").candidats(
            "game24", "propose", "4 6")[0][0] == "4 * 6 = 24 (left: 24)"
        with pytest.raises(ValueError):
            construire_politique("absente", "game24")


class TestEntrees:
    """Tests pour le chargement des instances"""

    def test_jeu_genere(self):
        entrees = charger_entrees(ConfigExperience(taille_jeu_donnees=3))
        assert len(entrees) == 3
        cle, entree = entrees[0]
        assert cle == " ".join(map(str, entree["origine"]))

    def test_fichier(self, tmp_path):
        chemin = tmp_path / "jeu.txt"
        chemin.write_text("4 9 10 13\n1 1 4 6\n", encoding="utf-8")
        entrees = charger_entrees(ConfigExperience(jeu_donnees=str(chemin)))
        assert [cle for cle, _ in entrees] == ["4 9 10 13", "1 1 4 6"]

    def test_ecriture_generee(self):
        entrees = charger_entrees(ConfigExperience(tache="creative-writing", taille_jeu_donnees=2))
        assert [cle for cle, _ in entrees] == ["cw-001", "cw-002"]
        assert len(entrees[0][1]["phrases"]) == 4

    def test_graine_run_stable(self):
        config = ConfigExperience(graine=5)
        assert graine_run(config, 1, 0) == graine_run(config, 1, 0)
        assert graine_run(config, 1, 0) != graine_run(config, 1, 1)


class TestExperience:
    """Tests pour l'exécution d'un lot"""

    def test_lot_jeu24(self, tmp_path):
        config = config_jeu24(tmp_path / "sortie")
        enregistrements, bundle = executer_experience(config, afficher=False)
        assert len(enregistrements) == 4
        assert [e["identifiant"] for e in enregistrements] == sorted(e["identifiant"] for e in enregistrements)
        assert enregistrements[0]["identifiant"] == "game24-t2ot-i000-r00"
        assert (tmp_path / "sortie" / "enregistrements.json").exists()
        assert (tmp_path / "sortie" / "rapport.json").exists()
        assert bundle["compteurs"]["runs"] == 4
        assert BaseEnregistrements(str(tmp_path / "sortie" / "enregistrements.json")).compter() == 4

    def test_deux_lots_dans_le_meme_dossier(self, tmp_path):
        executer_experience(config_jeu24(tmp_path, taille_jeu_donnees=5, repetitions=1), afficher=False)
        enregistrements, bundle = executer_experience(
            config_jeu24(tmp_path, taille_jeu_donnees=2, repetitions=1), afficher=False)
        assert len(enregistrements) == 2
        assert bundle["succes"]["t2ot"]["runs"] == 2
        assert BaseEnregistrements(str(tmp_path / "enregistrements.json")).compter() == 2
        rapport = json.loads((tmp_path / "rapport.json").read_text(encoding="utf-8"))
        assert rapport["succes"]["t2ot"]["runs"] == 2
        with open(tmp_path / "enregistrements.csv", encoding="utf-8") as f:
            assert len(f.read().strip().splitlines()) == 3

    def test_enregistrement_complet(self, tmp_path):
        enregistrement = executer_experience(config_jeu24(tmp_path, repetitions=1), afficher=False)[0][0]
        for cle in ("identifiant", "tache", "methode", "instance", "graine", "config", "empreinte_config",
                    "entree", "transcription", "verdict", "usage", "complet", "temps"):
            assert cle in enregistrement
        assert enregistrement["empreinte_config"] == empreinte_config(enregistrement["config"])
        assert enregistrement["transcription"]["arbres"][0]["graine"] == enregistrement["graine"]

    def test_determinisme(self, tmp_path):
        a, _ = executer_experience(config_jeu24(tmp_path / "a"), afficher=False)
        b, _ = executer_experience(config_jeu24(tmp_path / "b", parallelisme=3), afficher=False)
        sans_sortie = [{**sans_temps(e), "config": None, "empreinte_config": None} for e in a]
        autre = [{**sans_temps(e), "config": None, "empreinte_config": None} for e in b]
        assert serialiser(sans_sortie) == serialiser(autre)

    def test_jeu_de_donnees_absent_avant_tout_appel(self, tmp_path):
        backend = BackendCompteur()
        config = config_jeu24(tmp_path, jeu_donnees=str(tmp_path / "absent.txt"))
        with pytest.raises(IOError):
            executer_experience(config, afficher=False, backend=backend)
        assert backend.appels == 0

    def test_backend_en_echec(self, tmp_path):
        enregistrements, bundle = executer_experience(config_jeu24(tmp_path), afficher=False,
                                                      backend=BackendCompteur(echouer=True))
        assert len(enregistrements) == 4
        assert not any(e["complet"] for e in enregistrements)
        assert bundle["compteurs"]["runs_incomplets"] == 4
        assert "rate-limit" in enregistrements[0]["transcription"]["erreurs"][0]

    def test_reponse_http_mal_formee(self, tmp_path):
        """Une réponse 200 mal formée marque le run incomplet sans arrêter le lot"""
        transport = httpx.MockTransport(lambda requete: httpx.Response(200, json={"choices": ["x"]}))
        backend = ClientHTTP("https://api.exemple.test/v1", "gpt-4", cle_api="cle-test", transport=transport,
                             attente=lambda _: None)
        enregistrements, bundle = executer_experience(config_jeu24(tmp_path), afficher=False, backend=backend)
        assert len(enregistrements) == 4
        assert bundle["compteurs"]["runs_incomplets"] == 4
        assert "protocol" in enregistrements[0]["transcription"]["erreurs"][0]

    def test_references(self, tmp_path):
        enregistrements, bundle = executer_experience(
            config_jeu24(tmp_path, methode="io", temperature_baseline=0.001), afficher=False)
        assert all(e["verdict"]["verifie"] for e in enregistrements)
        assert bundle["succes"]["io"]["affichage"] == "100.0%"

    def test_ecriture(self, tmp_path):
        enregistrements, bundle = executer_experience(config_ecriture(tmp_path), afficher=False)
        assert len(enregistrements) == 2
        for enregistrement in enregistrements:
            assert len(enregistrement["transcription"]["arbres"][0]["etapes"]) == 2
            assert enregistrement["verdict"]["score"] is not None
        assert "t2ot" in bundle["scores"]

    def test_reference_ecriture_jugee(self, tmp_path):
        enregistrements, bundle = executer_experience(config_ecriture(tmp_path, methode="cot"), afficher=False)
        arbre = enregistrements[0]["transcription"]["arbres"][0]
        appels = arbre["etapes"][0]["appels"]
        assert [a["phase"] for a in appels] == ["write", "judge"]
        assert enregistrements[0]["verdict"]["score"] == arbre["score"]
        assert "cot" in bundle["scores"]

    def test_ecriture_interrompue_au_passage(self, tmp_path):
        """Le jugement du plan ne sert pas de score quand le passage n'a pas été écrit"""
        backend = BackendCompteur(phase="write", politique=construire_politique(None, "creative-writing"))
        enregistrements, bundle = executer_experience(config_ecriture(tmp_path, taille_jeu_donnees=1),
                                                      afficher=False, backend=backend)
        enregistrement = enregistrements[0]
        assert not enregistrement["complet"]
        assert enregistrement["verdict"]["reponse"] is None
        assert enregistrement["verdict"]["score"] is None
        assert "t2ot" not in bundle["scores"]
        assert bundle["compteurs"]["runs_incomplets"] == 1


class TestRelecture:
    """Tests pour la relecture d'enregistrements"""

    @pytest.fixture
    def enregistrement(self, tmp_path):
        executer_experience(config_jeu24(tmp_path, repetitions=1), afficher=False)
        return BaseEnregistrements(str(tmp_path / "enregistrements.json")).obtenir_tous()[0]

    def test_identique(self, enregistrement):
        assert rejouer(enregistrement) == IDENTIQUE

    def test_identique_ecriture(self, tmp_path):
        executer_experience(config_ecriture(tmp_path, taille_jeu_donnees=1), afficher=False)
        enregistrement = BaseEnregistrements(str(tmp_path / "enregistrements.json")).obtenir_tous()[0]
        assert rejouer(enregistrement) == IDENTIQUE

    def test_difference(self, enregistrement):
        enregistrement["transcription"]["reponse"] = "1+1"
        diff = rejouer(enregistrement)
        assert diff != IDENTIQUE
        assert "1+1" in diff

    def test_empreinte_incoherente(self, enregistrement):
        enregistrement["config"]["graine"] = 999
        with pytest.raises(ValueError):
            rejouer(enregistrement)

    def test_backend_http_refuse(self, enregistrement):
        enregistrement["config"]["backend"]["type"] = "http"
        enregistrement["empreinte_config"] = empreinte_config(enregistrement["config"])
        with pytest.raises(ValueError):
            rejouer(enregistrement)
