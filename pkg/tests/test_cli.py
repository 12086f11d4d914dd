import json

import pytest

from alcbasis.cli import main
from helpers import NINE_AXIOMS, SIMPSONS_ALCM


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "simpsons.alcm"
    path.write_text(SIMPSONS_ALCM)
    return str(path)


@pytest.fixture
def theory_file(tmp_path):
    path = tmp_path / "basis.min.theory"
    path.write_text(NINE_AXIOMS)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestEval:
    def test_extension_printed_in_declaration_order(self, capsys, model_file):
        code, out, _ = run(capsys, "eval", model_file, "-c", "exists marriedTo . Wife")
        assert code == 0
        assert out == "{Homer}\n"

    def test_empty_set(self, capsys, model_file):
        code, out, _ = run(capsys, "eval", model_file, "-c", "Male & Wife")
        assert code == 0
        assert out == "{}\n"

    def test_unknown_name_is_input_error(self, capsys, model_file):
        code, out, err = run(capsys, "eval", model_file, "-c", "Bart")
        assert code == 2
        assert "Bart" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "eval", "/nonexistent.alcm", "-c", "top")
        assert code == 2
        assert err


class TestCheck:
    def test_all_satisfied(self, capsys, model_file, theory_file):
        code, out, _ = run(capsys, "check", model_file, theory_file)
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 9
        assert all(line.startswith("sat") for line in lines)

    def test_violated_gci_flips_exit_code(self, capsys, model_file, tmp_path):
        theory = tmp_path / "bad.theory"
        theory.write_text("Male <= Wife\nHusband <= Male\n")
        code, out, _ = run(capsys, "check", model_file, str(theory))
        assert code == 1
        assert out.splitlines()[0].startswith("unsat")
        assert out.splitlines()[1].startswith("sat")

    def test_fixpoint_definitions_checked(self, capsys, model_file, tmp_path):
        theory = tmp_path / "fix.theory"
        theory.write_text(
            "gfp Husband = Male & exists marriedTo . Wife\n"
            "gfp Wife = Female & exists marriedTo . Husband\n"
        )
        code, out, _ = run(capsys, "check", model_file, str(theory))
        assert code == 0
        assert all(line.startswith("sat") for line in out.strip().splitlines())


class TestFixpoint:
    DEFINITION = "Husband = Male & exists marriedTo . (Female & exists marriedTo . Husband)"

    def test_gfp_satisfied(self, capsys, model_file):
        code, out, _ = run(capsys, "fixpoint", model_file, "--gfp", self.DEFINITION)
        assert code == 0
        assert out == "{Homer}\nsatisfied\n"

    def test_lfp_not_satisfied(self, capsys, model_file):
        code, out, _ = run(capsys, "fixpoint", model_file, "--lfp", self.DEFINITION)
        assert code == 1
        assert out == "{}\nnot satisfied\n"


class TestBasis:
    def test_plain_output_has_stats_footer(self, capsys, model_file):
        code, out, _ = run(capsys, "basis", model_file)
        assert code == 0
        assert "# mode: separating" in out
        assert "# classes: 4" in out

    def test_json_counts_match_printed_theory(self, capsys, model_file):
        code, plain, _ = run(capsys, "basis", model_file)
        gci_lines = [l for l in plain.splitlines() if l and not l.startswith("#")]
        code, out, _ = run(capsys, "basis", model_file, "--json")
        record = json.loads(out)
        assert record["mode"] == "separating"
        assert record["classes"] == 4
        assert record["raw_count"] == len(gci_lines)
        assert record["minimized_count"] is None

    def test_minimized_json(self, capsys, model_file):
        code, out, _ = run(capsys, "basis", model_file, "--minimize", "--json")
        record = json.loads(out)
        assert record["minimized_count"] is not None
        assert record["minimized_count"] <= record["raw_count"]

    def test_minimized_line_count_matches(self, capsys, model_file):
        code, out, _ = run(capsys, "basis", model_file, "--minimize")
        gci_lines = [l for l in out.splitlines() if l and not l.startswith("#")]
        stats = [l for l in out.splitlines() if l.startswith("# minimized:")]
        assert stats and int(stats[0].split(":")[1]) == len(gci_lines)

    def test_closure_mode_flag(self, capsys, model_file):
        code, out, _ = run(capsys, "basis", model_file, "--mode", "closure", "--json")
        assert json.loads(out)["mode"] == "closure"

    def test_deterministic_output(self, capsys, model_file):
        _, first, _ = run(capsys, "basis", model_file, "--minimize")
        _, second, _ = run(capsys, "basis", model_file, "--minimize")
        assert first == second


class TestEntails:
    def test_entailed(self, capsys, theory_file):
        code, out, _ = run(capsys, "entails", theory_file, "Husband <= Male")
        assert code == 0
        assert out == "entailed\n"

    def test_not_entailed(self, capsys, theory_file):
        code, out, _ = run(capsys, "entails", theory_file, "Male <= Wife")
        assert code == 1
        assert out == "not entailed\n"

    def test_witness_output_parses_as_model(self, capsys, theory_file, tmp_path):
        from alcbasis import parse_model

        code, out, _ = run(
            capsys, "entails", theory_file, "Male <= Wife", "--show-witness"
        )
        assert code == 1
        model_text = out.split("\n", 1)[1]
        parse_model(model_text)

    def test_budget_exit_code(self, capsys, theory_file):
        code, out, _ = run(
            capsys, "entails", theory_file, "Husband <= Male", "--budget", "0"
        )
        assert code == 3
        assert out == "timeout\n"


class TestCountermodel:
    def test_found_model_printed(self, capsys, theory_file):
        code, out, _ = run(capsys, "countermodel", theory_file, "Male <= Wife", "--max-size", "2")
        assert code == 0
        assert out.startswith("signature")

    def test_none_found(self, capsys, tmp_path):
        theory = tmp_path / "empty.theory"
        theory.write_text("# nothing\n")
        code, out, _ = run(
            capsys, "countermodel", str(theory),
            "exists r . (A & B) <= exists r . A", "--max-size", "3",
        )
        assert code == 1
        assert out == "none\n"

    def test_budget_exit_code(self, capsys, tmp_path):
        theory = tmp_path / "empty.theory"
        theory.write_text("")
        code, _, err = run(
            capsys, "countermodel", str(theory),
            "exists r . (A & B) <= exists r . A", "--max-size", "4", "--budget", "10",
        )
        assert code == 3
        assert "budget" in err


class TestMorphism:
    def test_identity_iso(self, capsys, model_file, tmp_path):
        mapfile = tmp_path / "id.map"
        mapfile.write_text("Homer -> Homer\nMarge -> Marge\n")
        code, out, _ = run(capsys, "morphism", model_file, model_file, str(mapfile))
        assert code == 0
        assert out == "morphism mono epi iso\n"

    def test_swap_not_a_morphism(self, capsys, model_file, tmp_path):
        mapfile = tmp_path / "swap.map"
        mapfile.write_text("Homer -> Marge\nMarge -> Homer\n")
        code, out, _ = run(capsys, "morphism", model_file, model_file, str(mapfile))
        assert code == 1
        assert out.startswith("not-a-morphism")


class TestCoproductAndQuotient:
    def test_coproduct_round_trips_and_quotients_back(self, capsys, model_file, tmp_path):
        out_path = tmp_path / "doubled.alcm"
        code, _, _ = run(capsys, "coproduct", model_file, model_file, "-o", str(out_path))
        assert code == 0
        from alcbasis import parse_model

        doubled = parse_model(out_path.read_text())
        assert doubled.carrier == ("0#Homer", "0#Marge", "1#Homer", "1#Marge")

        q_path = tmp_path / "quotient.alcm"
        code, _, _ = run(capsys, "bisim-quotient", str(out_path), "-o", str(q_path))
        assert code == 0
        q = parse_model(q_path.read_text())
        assert q.n == 2

    def test_covariety_basis_json(self, capsys, model_file):
        code, out, _ = run(capsys, "covariety-basis", model_file, model_file, "--json")
        assert code == 0
        record = json.loads(out)
        assert record["raw_count"] > 0


class TestArgumentErrors:
    def test_unknown_flag_rejected(self, capsys, model_file):
        with pytest.raises(SystemExit) as exc:
            main(["eval", model_file, "-c", "top", "--frobnicate"])
        assert exc.value.code == 2

    def test_unknown_subcommand_rejected(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2
