"""Tests for the command line.

Tests cover:
- Exit codes 0 (affirmative), 1 (certified negative) and 2 (input error)
- Exact rationals in the JSON reports
- Scenario validation diagnostics
- Measure files placed on atoms by label
- Byte-identical output across runs
"""

import io
import json

import pytest

from src.conecert.casebook import CASE_REGISTRY
from src.conecert.cli import EXIT_AFFIRMATIVE, EXIT_INPUT_ERROR, EXIT_NEGATIVE, run


def _scenario(values, kind="cone"):
    return {
        "atoms": [{"label": "w1", "weight": "3/5"}, {"label": "w2", "weight": "2/5"}],
        "generators": [{"name": "X", "values": values}],
        "cone_kind": kind,
    }


def _product(weights):
    labels = ["1,1", "1,2", "2,1", "2,2"]
    return {
        "atoms": [{"label": a, "weight": w} for a, w in zip(labels, weights)],
        "product": {
            "rows": ["1", "2"],
            "cols": ["1", "2"],
            "marginal1": ["1/2", "1/2"],
            "marginal2": ["1/2", "1/2"],
        },
    }


@pytest.fixture
def write(tmp_path):
    """Write a JSON document (or raw text) and return its path."""
    def _write(content, name="scenario.json"):
        path = tmp_path / name
        path.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(path)
    return _write


def invoke(*argv):
    """Run the command line and return (code, parsed stdout, stderr text)."""
    stdout, stderr = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=stdout, stderr=stderr)
    text = stdout.getvalue()
    return code, (json.loads(text) if text else None), stderr.getvalue()


def stdout_of(*argv):
    """Run the command line and return its raw standard output."""
    stdout = io.StringIO()
    run(list(argv), stdout=stdout, stderr=io.StringIO())
    return stdout.getvalue()


class TestCheck:
    """Tests for the check command."""

    def test_two_atoms(self, write):
        """Test all verdicts hold with the exact constants."""
        code, payload, _ = invoke("check", write(_scenario(["1", "-1"])))
        assert code == EXIT_AFFIRMATIVE
        assert payload["verdicts"] == {"NA": True, "A": True, "D": True, "b*": True, "esm": True}
        assert payload["agree"] is True
        assert payload["constants"] == {
            "k_b": "1/5",
            "k_b_star": "1/2",
            "c_from_k_b_star": "1/5",
            "c_b_star_star": None,
        }
        assert payload["condition_c"] == {
            "pairs": [{"n": 1, "atoms": ["w1", "w2"], "k_n": "6/5"}],
            "holds": True,
        }
        assert payload["certificates_verified"] is True

    def test_linear_space(self, write):
        """Test (b**) is reported for a linear space."""
        code, payload, _ = invoke("check", write(_scenario(["1", "-1"], kind="linear")))
        assert code == EXIT_AFFIRMATIVE
        assert payload["constants"]["c_b_star_star"] == "1/5"

    def test_arbitrage(self, write):
        """Test every verdict fails together."""
        code, payload, _ = invoke("check", write(_scenario(["1", "0"])))
        assert code == EXIT_NEGATIVE
        assert set(payload["verdicts"].values()) == {False}
        assert payload["agree"] is True
        assert payload["condition_c"] is None

    def test_deterministic(self, write):
        """Test two runs print byte-identical reports."""
        path = write(_scenario(["1", "-1"]))
        assert stdout_of("check", path) == stdout_of("check", path)


class TestEsmAndBand:
    """Tests for the esm and band commands."""

    def test_esm_found(self, write):
        """Test the ESM (1/2, 1/2)."""
        code, payload, _ = invoke("esm", write(_scenario(["1", "-1"])))
        assert code == EXIT_AFFIRMATIVE
        assert payload["measure"] == {"w1": "1/2", "w2": "1/2"}
        assert payload["tau"] == "5/6"

    def test_esm_obstruction(self, write):
        """Test a certified negative answer."""
        code, payload, _ = invoke("esm", write(_scenario(["1", "0"])))
        assert code == EXIT_NEGATIVE
        assert payload["found"] is False
        assert payload["certificate_verified"] is True
        assert payload["obstruction"]["status"] == "infeasible"
        assert payload["obstruction"]["rows"] == ["supermartingale[X]"]

    def test_band(self, write):
        """Test k = 1/2 succeeds and k = 0 is a certified negative."""
        path = write(_scenario(["1", "-1"]))
        assert invoke("band", path, "--k", "1/2")[0] == EXIT_AFFIRMATIVE
        code, payload, _ = invoke("band", path, "--k", "0")
        assert code == EXIT_NEGATIVE
        assert payload["certificate_verified"] is True

    def test_band_bad_constant(self, write):
        """Test a malformed constant is an input error."""
        code, _, stderr = invoke("band", write(_scenario(["1", "-1"])), "--k", "abc")
        assert code == EXIT_INPUT_ERROR
        assert stderr.startswith("error:")


class TestKmin:
    """Tests for the kmin command."""

    def test_modes(self, write):
        """Test (b) and (b*) constants under P0."""
        path = write(_scenario(["1", "-1"]))
        assert invoke("kmin", path, "--mode", "b")[1]["value"] == "1/5"
        assert invoke("kmin", path)[1]["value"] == "1/2"

    def test_measure_file(self, write):
        """Test Q read from a file."""
        path = write(_scenario(["1", "-1"]))
        q = write({"weights": ["1/2", "1/2"]}, name="q.json")
        code, payload, _ = invoke("kmin", path, "--q", q)
        assert code == EXIT_AFFIRMATIVE
        assert payload["value"] == "0"

    def test_c_star_star_needs_linear_space(self, write):
        """Test (b**) on a cone is an input error."""
        code, _, _ = invoke("kmin", write(_scenario(["1", "-1"])), "--mode", "cstarstar")
        assert code == EXIT_INPUT_ERROR

    def test_c_star_star(self, write):
        """Test c below 1 is affirmative."""
        code, payload, _ = invoke(
            "kmin", write(_scenario(["1", "-1"], kind="linear")), "--mode", "cstarstar"
        )
        assert code == EXIT_AFFIRMATIVE
        assert payload["value"] == "1/5"

    def test_infinite(self, write):
        """Test an arbitrage makes minK infinite."""
        code, payload, _ = invoke("kmin", write(_scenario(["1", "0"])))
        assert code == EXIT_NEGATIVE
        assert payload["status"] == "infinite"


class TestCouple:
    """Tests for the couple command."""

    def test_uniform(self, write):
        """Test the uniform coupling."""
        code, payload, _ = invoke("couple", write(_product(["1/4"] * 4)))
        assert code == EXIT_AFFIRMATIVE
        assert payload["coupling"] == [["1/4", "1/4"], ["1/4", "1/4"]]
        assert payload["marginals_match"] is True
        assert payload["inf_criterion"] == "0"

    def test_triangle(self, write):
        """Test a null cell rules out an equivalent coupling."""
        code, payload, _ = invoke("couple", write(_product(["1/3", "1/3", "1/3", "0"])))
        assert code == EXIT_NEGATIVE
        assert payload["inf_criterion"] == "1"
        assert payload["certificate_verified"] is True

    def test_needs_product(self, write):
        """Test couple refuses a scenario without a product block."""
        assert invoke("couple", write(_scenario(["1", "-1"])))[0] == EXIT_INPUT_ERROR


class TestCase:
    """Tests for the case command."""

    def test_approx_esfa(self):
        """Test the approximate-ESFA case with floats marked approximate."""
        code, payload, _ = invoke("case", "approx-esfa", "--eps", "1/10", "--N", "8", "--n", "4")
        assert code == EXIT_AFFIRMATIVE
        assert payload["parameters"]["eps"] == "1/10"
        claims = {c["label"]: c for c in payload["claims"]}
        assert claims["truncated ratio matches e^-1/(1-e^-2)"]["value"].startswith("~0.425")
        assert claims["no equivalent ESM for X0..X8"]["value"] == "0"

    def test_horizon_option(self):
        """Test --horizon reaches the sign-sequence case and is range checked."""
        code, payload, _ = invoke("case", "sign-sequences", "--n", "3", "--horizon", "2", "--samples", "10")
        assert code == EXIT_AFFIRMATIVE
        assert payload["parameters"]["horizon"] == "2"
        assert invoke("case", "sign-sequences", "--n", "2", "--horizon", "3")[0] == EXIT_INPUT_ERROR

    def test_inapplicable_option(self):
        """Test options a case does not take are input errors."""
        code, _, stderr = invoke("case", "nflvr-gap", "--eps", "1/2")
        assert code == EXIT_INPUT_ERROR
        assert "--eps" in stderr

    def test_invalid_parameters(self):
        """Test validation failures are input errors."""
        assert invoke("case", "nflvr-gap", "--M", "1")[0] == EXIT_INPUT_ERROR


class TestInputErrors:
    """Tests for malformed input."""

    def test_invalid_json(self, write):
        """Test the diagnostic names the file position."""
        path = write("{")
        code, payload, stderr = invoke("check", path)
        assert code == EXIT_INPUT_ERROR
        assert payload is None
        assert f"{path}:1:" in stderr

    @pytest.mark.parametrize("document", [
        {"atoms": [{"label": "a", "weight": 0.5}, {"label": "b", "weight": 0.5}]},
        {"atoms": [{"label": "a", "weight": "1/2"}, {"label": "b", "weight": "1/3"}]},
        {"atoms": [{"label": "a", "weight": "1"}, {"label": "b", "weight": "0"}]},
        {"atoms": [{"label": "a", "weight": "abc"}]},
        {"atoms": [{"label": "a", "weight": "1"}], "generators": [{"name": "X", "values": ["1", "2"]}]},
        {"atoms": [{"label": "a", "weight": "1"}], "extra": True},
        {"atoms": [{"label": "a", "weight": "1/2"}, {"label": "a", "weight": "1/2"}]},
    ])
    def test_rejected(self, write, document):
        """Test malformed scenarios exit with code 2."""
        code, _, stderr = invoke("check", write(document))
        assert code == EXIT_INPUT_ERROR
        assert stderr.startswith("error:")

    def test_missing_file(self, tmp_path):
        """Test an unreadable file is an input error."""
        assert invoke("check", str(tmp_path / "absent.json"))[0] == EXIT_INPUT_ERROR

    def test_unknown_command(self):
        """Test argparse failures map to code 2."""
        assert invoke("frobnicate")[0] == EXIT_INPUT_ERROR


def _unordered_product():
    """Cells listed out of row-major order, with (b,x) outside the support."""
    return {
        "atoms": [
            {"label": "b,y", "weight": "1/2"},
            {"label": "a,x", "weight": "1/4"},
            {"label": "a,y", "weight": "1/4"},
            {"label": "b,x", "weight": "0"},
        ],
        "product": {
            "rows": ["a", "b"],
            "cols": ["x", "y"],
            "marginal1": ["1/2", "1/2"],
            "marginal2": ["1/4", "3/4"],
        },
    }


class TestMeasureFiles:
    """Measure files are placed on atoms by label, not by position."""

    def test_list_follows_file_order(self, write):
        """Test a weight list in the scenario's atom order lands on the right cells."""
        path = write(_unordered_product())
        q = write({"weights": ["1/2", "1/4", "1/4", "0"]}, name="q.json")
        code, payload, _ = invoke("kmin", path, "--mode", "b", "--q", q)
        assert code == EXIT_AFFIRMATIVE
        assert payload["measure"] == ["1/4", "1/4", "1/2"]
        assert payload["value"] == "0"

    def test_mapping_by_label(self, write):
        """Test a label-keyed measure file."""
        path = write(_unordered_product())
        q = write({"weights": {"a,y": "1/4", "b,y": "1/2", "a,x": "1/4"}}, name="q.json")
        code, payload, _ = invoke("kmin", path, "--mode", "b", "--q", q)
        assert code == EXIT_AFFIRMATIVE
        assert payload["measure"] == ["1/4", "1/4", "1/2"]

    @pytest.mark.parametrize("weights", [
        ["1/2", "1/4", "1/4"],
        ["1/2", "1/4", "0", "1/4"],
        {"a,x": "1/4", "a,y": "1/4", "b,y": "1/2", "c,x": "0"},
        {"a,x": "1/2", "b,y": "1/2"},
        [],
    ])
    def test_rejected(self, write, weights):
        """Test wrong lengths, mass off the support, unknown or missing labels."""
        path = write(_unordered_product())
        q = write({"weights": weights}, name="q.json")
        code, _, stderr = invoke("kmin", path, "--mode", "b", "--q", q)
        assert code == EXIT_INPUT_ERROR
        assert stderr.startswith("error:")

    def test_separator_in_label(self, write):
        """Test row and column labels containing "," are refused."""
        document = _product(["1/4"] * 4)
        document["product"]["rows"] = ["a,b", "2"]
        code, _, stderr = invoke("couple", write(document))
        assert code == EXIT_INPUT_ERROR
        assert "must not contain" in stderr


class TestDeterminism:
    """Every command prints byte-identical reports on repeated runs."""

    @pytest.mark.parametrize("values", [["1", "-1"], ["1", "0"]])
    @pytest.mark.parametrize("command, options", [
        ("esm", ()),
        ("kmin", ("--mode", "b")),
        ("kmin", ("--mode", "bstar")),
        ("band", ("--k", "1/2")),
        ("band", ("--k", "0")),
    ])
    def test_scenario_commands(self, write, values, command, options):
        """Test esm, kmin and band on an instance with and without an arbitrage."""
        path = write(_scenario(values))
        assert stdout_of(command, path, *options) == stdout_of(command, path, *options)

    @pytest.mark.parametrize("weights", [["1/4"] * 4, ["1/3", "1/3", "1/3", "0"]])
    def test_couple(self, write, weights):
        """Test couple on a feasible and an infeasible product."""
        path = write(_product(weights))
        assert stdout_of("couple", path) == stdout_of("couple", path)

    @pytest.mark.slow
    @pytest.mark.parametrize("name", sorted(CASE_REGISTRY))
    def test_every_case(self, name):
        """Test each registered case with its default parameters."""
        first = stdout_of("case", name)
        assert first
        assert first == stdout_of("case", name)
