import io
import subprocess
import sys

import pytest

from xprime6.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, load_group_file, main
from xprime6.errors import InputError


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_model_output():
    code, text = run("model", "--t", "1")
    assert code == EXIT_OK
    assert text.strip() == "a=-144 b=672 disc=-3981312 j=-82944"


def test_invert_j_output():
    assert run("invert-j", "--j", "1728") == (EXIT_OK, "t=1/2\n")
    assert run("invert-j", "--j", "0") == (EXIT_OK, "t=0\n")
    assert run("invert-j", "--j", "1")[1].strip() == "none"


def test_bad_rational_is_input_error():
    assert run("model", "--t", "1/0")[0] == EXIT_INPUT
    assert run("invert-j", "--j", "abc")[0] == EXIT_INPUT
    assert run("frobnicate")[0] == EXIT_INPUT
    assert run()[0] == EXIT_INPUT


def test_scan_exit_codes():
    code, text = run("scan", "--curve", "1,1", "--pmax", "200")
    assert code == EXIT_FAIL
    assert text.splitlines()[0] == "p=139 split=(1,2) full3=true violation=true"
    code, text = run("scan", "--curve=-144,672", "--pmax", "1000")
    assert code == EXIT_OK and "0 violations" in text
    assert run("scan", "--curve=-3,2", "--pmax", "100")[0] == EXIT_INPUT


def test_verify_symbolic():
    code, text = run("verify", "--suite", "symbolic")
    assert code == EXIT_OK
    assert text.strip().splitlines()[-1] == "summary: 12/12 steps passed"
    assert all(line.startswith(("step.", "summary")) for line in text.splitlines() if line)


def test_verify_is_deterministic():
    assert run("verify", "--suite", "groups") == run("verify", "--suite", "groups")


def test_classify_and_density(tmp_path):
    code, text = run("classify", "--level", "36", "--gen", "1,1;0,1")
    assert code == EXIT_OK
    assert text.splitlines() == ["order=36 class=none", "serre_obstructed=n/a reason=determinant not surjective"]
    code, text = run("density", "--level", "6", "--gen", "0,1;1,0")
    assert code == EXIT_OK and "(L=100, GRH)" in text and "correction: C=2" in text


def test_load_group_file(tmp_path):
    f = tmp_path / "s3.txt"
    f.write_text("# the full group mod 2\nmod 2\n0,1;1,0\n1,1;0,1\n")
    assert load_group_file(f).order == 6
    f.write_text("mod 5\n")
    assert load_group_file(f).order == 1
    f.write_text("mod 6\n1,0;0,1\n2,0;0,2\n")
    with pytest.raises(InputError, match=r"s3.txt:3: 2,0;0,2 has det 4"):
        load_group_file(f)
    f.write_text("1,0;0,1\n")
    with pytest.raises(InputError):
        load_group_file(f)


def test_meta_flag():
    code, text = run("--meta", "model", "--t", "0")
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == "a=0 b=32 disc=-442368 j=0 cm=true"
    assert lines[1].startswith("meta: seconds=")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "xprime6", "model", "--t", "1/2"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "a=12 b=0 disc=-110592 j=1728 cm=true"
