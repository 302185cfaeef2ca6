import subprocess
import sys

import pytest

from soe.cli import main
from soe.examples import deterministic_pair, three_by_three
from soe.formats import emit_entity


@pytest.fixture
def worked_file(tmp_path):
    path = tmp_path / "worked.soe"
    path.write_text(emit_entity(three_by_three()), encoding="utf-8")
    return str(path)


@pytest.fixture
def pair_files(tmp_path):
    small = deterministic_pair()
    small_path = tmp_path / "small.soe"
    small_path.write_text(emit_entity(small), encoding="utf-8")
    big_table = {
        ("H", "S"): {"UP"},
        ("H", "T"): {"DOWN"},
        ("K", "S"): {"LEFT"},
        ("K", "T"): {"LEFT"},
    }
    from soe.entity import Entity

    big = Entity({"S", "T"}, {"H", "K"}, big_table)
    big_path = tmp_path / "big.soe"
    big_path.write_text(emit_entity(big), encoding="utf-8")
    witness_path = tmp_path / "witness.soe"
    witness_path.write_text(
        "[witness]\n"
        "m S = s\nm T = t\n"
        "n h = H\nn k = K\n"
        "l up = UP\nl down = DOWN\nl left = LEFT\n",
        encoding="utf-8",
    )
    return str(small_path), str(big_path), str(witness_path)


class TestClosuresCommand:
    def test_worked_state_family(self, worked_file, capsys):
        code = main(["closures", worked_file, "--kind", "eigen", "--on", "states"])
        out = capsys.readouterr().out
        assert code == 0
        for member in ("{}", "{p}", "{q}", "{r}", "{p,q}", "{p,r}", "{p,q,r}"):
            assert f"  {member}\n" in out
        assert "members: 7" in out

    def test_scoped_ortho(self, worked_file, capsys):
        code = main(["closures", worked_file, "--kind", "ortho", "--on", "states", "--for", "e"])
        out = capsys.readouterr().out
        assert code == 0
        assert "members: 2" in out

    def test_structured_output(self, worked_file, capsys):
        code = main(["closures", worked_file, "--kind", "eigen", "--on", "states", "--structured"])
        out = capsys.readouterr().out
        assert code == 0
        assert "closures.size = 7" in out
        assert "closures.member.0 = {}" in out

    def test_outcome_closures(self, worked_file, capsys):
        assert main(["closures", worked_file, "--kind", "eigen", "--on", "outcomes"]) == 0
        assert main(["closures", worked_file, "--kind", "ortho", "--on", "outcomes"]) == 0
        capsys.readouterr()

    def test_deterministic_bytes(self, worked_file, capsys):
        main(["closures", worked_file, "--kind", "eigen", "--on", "central"])
        first = capsys.readouterr().out
        main(["closures", worked_file, "--kind", "eigen", "--on", "central"])
        second = capsys.readouterr().out
        assert first == second


class TestClassifyCommand:
    def test_worked_flags(self, worked_file, capsys):
        code = main(["classify", worked_file])
        out = capsys.readouterr().out
        assert code == 0
        assert "outcome_determined = true" in out
        assert "central_atomic = false" in out
        assert "distinguishable = false" in out
        assert "witness[central_atomic] = (e,p) , (g,r)" in out

    def test_structured(self, worked_file, capsys):
        main(["classify", worked_file, "--structured"])
        out = capsys.readouterr().out
        assert "classify.state_atomic = true" in out


class TestAnalyzeCommand:
    def test_contains_relations(self, worked_file, capsys):
        code = main(["analyze", worked_file])
        out = capsys.readouterr().out
        assert code == 0
        assert "(g,q) < (e,p)" in out
        assert "(e,p) | (f,p)" in out

    def test_structured(self, worked_file, capsys):
        main(["analyze", worked_file, "--structured"])
        out = capsys.readouterr().out
        assert "analyze.central.implication.0 = " in out


class TestQmachineCommand:
    def test_third_angle(self, capsys):
        code = main(["qmachine", "--theta", "1.0471975511965976", "--phi", "0", "--axis-theta", "0"])
        out = capsys.readouterr().out
        assert code == 0
        assert "p1 = 0.75" in out

    def test_center(self, capsys):
        main(["qmachine", "--theta", "0", "--phi", "0", "--radius", "0"])
        out = capsys.readouterr().out
        assert "p1 = 0.5" in out

    def test_structured_matches_elastic_and_hilbert(self, capsys):
        main(
            [
                "qmachine",
                "--theta", "0.7", "--phi", "1.2", "--radius", "0.4",
                "--axis-theta", "0.3", "--axis-phi", "2.2",
                "--structured",
            ]
        )
        out = capsys.readouterr().out
        values = dict(line.split(" = ") for line in out.strip().splitlines())
        assert float(values["qmachine.max_difference"]) <= 1e-10
        assert abs(
            float(values["qmachine.elastic.p1"]) + float(values["qmachine.elastic.p2"]) - 1.0
        ) <= 1e-12


class TestVerifyCommand:
    def test_worked_passes(self, worked_file, capsys):
        code = main(["verify", worked_file])
        out = capsys.readouterr().out
        assert code == 0
        assert "verdict: pass" in out

    def test_measure_checked(self, tmp_path, capsys):
        text = emit_entity(three_by_three()) + "[probability bad]\ne p x1 = 0.25\n"
        path = tmp_path / "bad.soe"
        path.write_text(text, encoding="utf-8")
        code = main(["verify", str(path)])
        out = capsys.readouterr().out
        assert code == 1
        assert "verdict: FAIL" in out


class TestSubentityCommand:
    def test_pass(self, pair_files, capsys):
        small, big, witness = pair_files
        code = main(["subentity", small, big, "--witness", witness])
        out = capsys.readouterr().out
        assert code == 0
        assert "verdict: pass" in out

    def test_fail_exit_code(self, pair_files, tmp_path, capsys):
        small, big, witness = pair_files
        bad = tmp_path / "bad_witness.soe"
        bad.write_text(
            "[witness]\nm S = s\nm T = t\nn h = H\nn k = K\n"
            "l up = UP\nl down = UP\nl left = LEFT\n",
            encoding="utf-8",
        )
        code = main(["subentity", small, big, "--witness", str(bad)])
        out = capsys.readouterr().out
        assert code == 1
        assert "FAIL" in out
        capsys.readouterr()


class TestProbabilisticSubentity:
    def test_measure_transport_via_files(self, tmp_path, capsys):
        from soe.entity import Entity
        from soe.probability import d_classical_measure

        small = deterministic_pair()
        big = Entity(
            {"S", "T"},
            {"H", "K"},
            {
                ("H", "S"): {"UP"},
                ("H", "T"): {"DOWN"},
                ("K", "S"): {"LEFT"},
                ("K", "T"): {"LEFT"},
            },
        )
        small_path = tmp_path / "small.soe"
        small_path.write_text(
            emit_entity(small, {"mu": d_classical_measure(small)}) + "[witness]\nk mu = nu\n",
            encoding="utf-8",
        )
        big_path = tmp_path / "big.soe"
        big_path.write_text(emit_entity(big, {"nu": d_classical_measure(big)}), encoding="utf-8")
        witness_path = tmp_path / "w.soe"
        witness_path.write_text(
            "[witness]\nm S = s\nm T = t\nn h = H\nn k = K\n"
            "l up = UP\nl down = DOWN\nl left = LEFT\n",
            encoding="utf-8",
        )
        code = main(
            ["subentity", str(small_path), str(big_path), "--witness", str(witness_path), "--probabilistic"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "verdict: pass" in out
        assert "k.transport_identity" in out


class TestQuantumEntityEndToEnd:
    def test_sampled_quantum_entity_passes_verify(self, tmp_path, capsys):
        import numpy as np

        from soe.quantum import finite_completed_entity, random_density, random_spectral_family

        rng = np.random.default_rng(13)
        entity, measure = finite_completed_entity(
            [random_density(rng, 2) for _ in range(3)],
            [random_spectral_family(rng, 2) for _ in range(2)],
        )
        path = tmp_path / "quantum.soe"
        path.write_text(emit_entity(entity, {"born": measure}), encoding="utf-8")
        code = main(["verify", str(path)])
        out = capsys.readouterr().out
        assert code == 0, out
        assert "pass probability.born" in out
        assert "verdict: pass" in out


class TestErrorPaths:
    def test_parse_error_exits_2(self, tmp_path, capsys):
        path = tmp_path / "broken.soe"
        path.write_text("[entity]\nstates = s\n", encoding="utf-8")
        code = main(["classify", str(path)])
        err = capsys.readouterr().err
        assert code == 2
        assert "error:" in err

    def test_missing_file_exits_2(self, capsys):
        code = main(["classify", "/nonexistent/entity.soe"])
        assert code == 2
        capsys.readouterr()

    def test_seed_env_var(self, worked_file, capsys, monkeypatch):
        monkeypatch.setenv("SOE_SEED", "7")
        code = main(["verify", worked_file])
        out = capsys.readouterr().out
        assert code == 0
        assert "(seed 7)" in out
        monkeypatch.setenv("SOE_SEED", "9")
        code = main(["--seed", "11", "verify", worked_file])
        out = capsys.readouterr().out
        assert code == 0
        assert "(seed 11)" in out  # the explicit flag wins

    def test_subprocess_entry_point(self, worked_file):
        result = subprocess.run(
            [sys.executable, "-m", "soe.cli", "classify", worked_file],
            capture_output=True,
            text=True,
            check=True,
        )
        assert "outcome_determined = true" in result.stdout
        assert result.stderr == ""
