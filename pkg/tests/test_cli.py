import pytest

from annular.cli import main
from annular.diagram import make_generator, to_text
from annular.presentations import builtin_presentation, format_presentation


@pytest.fixture
def e1_file(tmp_path):
    path = tmp_path / "e1.txt"
    path.write_text(to_text(make_generator("e", 3, 1)))
    return path


def test_compose_counts_loop(e1_file, tmp_path, capsys):
    out = tmp_path / "out.txt"
    assert main(["compose", str(e1_file), str(e1_file), "--out", str(out)]) == 0
    text = out.read_text()
    assert "betaExp=1" in text and text.startswith("diagram s=3 t=3")


def test_compose_arity_mismatch(e1_file, tmp_path):
    other = tmp_path / "e4.txt"
    other.write_text(to_text(make_generator("e", 4, 1)))
    assert main(["compose", str(e1_file), str(other)]) == 2


def test_check_builtin(capsys):
    assert main(["check", "--builtin", "pTL", "--m", "4"]) == 0
    assert "failures" in capsys.readouterr().out
    assert main(["check", "--builtin", "aBr", "--m", "3", "--A", "2"]) == 0


def test_check_corrupted_file(tmp_path, capsys):
    text = format_presentation(builtin_presentation("aTL", 3))
    lines = text.splitlines()
    for i, line in enumerate(lines):
        if line.startswith("rel") and "beta" in line:
            lines[i] = line.replace("beta", "")
            break
    path = tmp_path / "bad.pres"
    path.write_text("\n".join(lines) + "\n")
    assert main(["check", str(path)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_check_needs_input():
    assert main(["check"]) == 2


def test_topsets(capsys):
    assert main(["topsets", "--family", "aBr", "--r", "3", "--m", "5", "--upto"]) == 0
    assert main(["topsets", "--family", "aTL", "--m", "4", "--lambda", "4"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[-1].split(",")[4] == "1"


def test_gram_and_simpledims(capsys):
    assert main(["gram", "--family", "aPRo", "--m", "3", "--lambda", "1", "--beta", "2"]) == 0
    assert "star_symmetric=True" in capsys.readouterr().out
    assert main(["gram", "--family", "aTL", "--m", "3"]) == 2
    assert main(["simpledims", "--family", "aTL", "--m", "4", "--beta", "2"]) == 0


def test_growth_wallpaper_flags_discrepancy(capsys, caplog):
    assert main(["growth", "wallpaper", "p3", "generic", "nmax=4"]) == 0
    out = capsys.readouterr().out
    assert "3,13,3,True,DISCREPANCY" in out
    assert "4,27,27,True," in out


def test_growth_wreath_csv(tmp_path):
    out = tmp_path / "z.csv"
    assert main(["growth", "wreath", "Z", "S3", "weights=1,2,3", "nmax=5", "--out", str(out)]) == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "n,value,k_n,ratio"
    assert [r.split(",")[1] for r in rows[1:]] == ["1", "9", "42", "261", "1476"]


def test_growth_cell_with_dot(tmp_path):
    out, dot = tmp_path / "s.csv", tmp_path / "g.dot"
    rc = main(["growth", "cell", "aTL", "m=3", "lambda=1", "depth=6", "nmax=6",
               "--out", str(out), "--dot", str(dot)])
    assert rc == 0
    text = out.read_text()
    assert "# final_basic_classes=[[1, 2, 3]]" in text
    assert "6,,727," in text
    assert dot.read_text().startswith("digraph")


def test_bad_usage():
    with pytest.raises(SystemExit) as exc:
        main(["topsets", "--field", "4"])
    assert exc.value.code == 2
    assert main(["growth", "wreath", "Q"]) == 2
