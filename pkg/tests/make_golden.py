"""Regenerate the CLI golden files: python3 tests/make_golden.py"""
from contextlib import redirect_stdout
import io
from pathlib import Path

from bayesrr.cli import main

GOLDEN = Path(__file__).parent / "golden"

PRIOR_ARGS = {
    "uniform": ["--prior", "uniform"],
    "informative": ["--prior", "informative", "--epsilon", "0.1", "--delta", "0.55"],
    "jeffreys": ["--prior", "jeffreys"],
}

COMMANDS = {}
for name, pargs in PRIOR_ARGS.items():
    COMMANDS[f"analyze_standard_{name}.txt"] = ["analyze", "--test", "standard", *pargs]
    COMMANDS[f"analyze_modified_{name}.txt"] = ["analyze", "--test", "modified",
                                                "--beta-reference", "final", *pargs]
COMMANDS["hpd_218_130_uniform.txt"] = ["hpd", "--m", "218", "--x", "130"]
COMMANDS["hpd_211_124_informative.txt"] = ["hpd", "--m", "211", "--x", "124", *PRIOR_ARGS["informative"]]
COMMANDS["hpd_172_91_uniform.txt"] = ["hpd", "--m", "172", "--x", "91"]
COMMANDS["hpd_190_107_informative.txt"] = ["hpd", "--m", "190", "--x", "107", *PRIOR_ARGS["informative"]]
COMMANDS["umpbt_218_bf.txt"] = ["umpbt", "--m", "218", "--x", "130"]
COMMANDS["umpbt_211_jeffreys_level.txt"] = ["umpbt", "--m", "211", "--inv-lambda", "0.3162"]


def run(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


if __name__ == "__main__":
    for fname, argv in COMMANDS.items():
        code, out = run(argv)
        assert code == 0, (fname, code)
        (GOLDEN / fname).write_text(out)
        print("wrote", fname)
