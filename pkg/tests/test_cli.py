import io
import json
import shutil
import subprocess
import sys

import pytest

from lexrule.cli import run
from lexrule.lexicon import BUNDLED_GRAMMAR


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    lines = [json.loads(x) for x in out.getvalue().splitlines()]
    return code, lines, err.getvalue()


def test_analyze_prints_json_lines():
    code, lines, err = call("analyze", "kalemleri")
    assert code == 0 and err == ""
    assert len(lines) == 3
    assert {tuple(x["history"]) for x in lines} == {("poss3pl",), ("plu", "acc"), ("plu", "poss3sg")}
    assert set(lines[0]) == {"surface", "root", "type", "history", "case", "slots", "lf"}


def test_analyze_several_words():
    code, lines, _ = call("analyze", "arabada", "yolcu")
    assert code == 0 and {x["surface"] for x in lines} == {"arabada", "yolcu"}


def test_analyze_nothing_found():
    assert call("analyze", "zzz")[:2] == (1, [])


@pytest.mark.parametrize(
    "lemma, spec, surface",
    [("sabah", "derivation=CI", "sabahçı"), ("araba", "case=locative", "arabada"),
     ("çağır", "causative=caus,tense=past,person=3sg", "çağırttı")],
)
def test_generate(lemma, spec, surface):
    code, lines, _ = call("generate", lemma, "--spec", spec)
    assert code == 0 and lines == [{"lemma": lemma, "surface": surface}]


@pytest.mark.parametrize(
    "argv",
    [("generate", "araba", "--spec", "colour=red"), ("generate", "zzz"), ("frobnicate",),
     ("--grammar", "/nonexistent", "analyze", "ev"), ("generate", "araba", "--spec", "case")],
)
def test_errors_exit_2_with_one_line(argv):
    code, lines, err = call(*argv)
    assert code == 2 and lines == []
    assert err.startswith("lexrule: error: ") and err.count("\n") == 1


def test_bad_rule_file_is_reported(tmp_path):
    g = tmp_path / "g"
    shutil.copytree(BUNDLED_GRAMMAR, g)
    (g / "rules.txt").write_text((g / "rules.txt").read_text(encoding="utf-8") + "\nrule bad slot=NOWHERE\n", encoding="utf-8")
    code, _, err = call("--grammar", str(g), "analyze", "ev")
    assert code == 2 and "NOWHERE" in err


def test_compile_then_analyze_compiled(tmp_path):
    g = tmp_path / "g"
    shutil.copytree(BUNDLED_GRAMMAR, g)
    roots = (g / "roots.txt").read_text(encoding="utf-8").splitlines()
    (g / "roots.txt").write_text("\n".join(x for x in roots if x.startswith("root araba") or x.startswith("root uyu")), encoding="utf-8")
    out = tmp_path / "lex.json"
    code, (stats,), _ = call("--grammar", str(g), "compile", "--out", str(out))
    assert code == 0 and stats["total"] == stats["per_root"]["araba"] + stats["per_root"]["uyu"]
    code, lines, _ = call("--grammar", str(g), "--mode", "compiled", "--lexicon", str(out), "analyze", "arabada")
    runtime = call("--grammar", str(g), "analyze", "arabada")[1]
    assert code == 0 and lines == runtime


def test_compile_to_unwritable_path(tmp_path):
    code, _, err = call("compile", "--out", str(tmp_path / "no" / "such" / "dir" / "x.json"))
    assert code == 2 and "cannot write" in err


def test_bench_reports_identical_modes(tmp_path):
    words = tmp_path / "words.txt"
    words.write_text("arabada\nkalemleri\nyürürken\nzzz\n", encoding="utf-8")
    code, (rt, cp, summary), _ = call("bench", "--words", str(words))
    assert code == 0
    assert rt["resident_entries"] == 40 and cp["resident_entries"] >= 1000
    assert summary == {"words": 4, "identical": True, "mismatches": []}


def test_grammar_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("LEXRULE_GRAMMAR", str(tmp_path / "missing"))
    assert call("analyze", "ev")[0] == 2


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "lexrule.cli", "analyze", "kitabı"], capture_output=True, text=True, encoding="utf-8"
    )
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 2
