import pytest
from click.testing import CliRunner

from serifu.cli import main

SPEC_TEXT = """\
version = 1
seed = 17
lines_min = 25
lines_max = 30
group = boys:2:だぜ:0.9
group = girls:2:かしら:0.9
"""

CONFIG_TEXT = "version = 1\nfolds = 2\nsvm_epochs = 50\n"


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    runner = CliRunner()
    (root / "spec.cfg").write_text(SPEC_TEXT, encoding="utf-8")
    (root / "pipeline.cfg").write_text(CONFIG_TEXT, encoding="utf-8")
    result = runner.invoke(main, ["synth", str(root / "spec.cfg"),
                                  "-o", str(root / "corpus.tsv")])
    assert result.exit_code == 0, result.output
    result = runner.invoke(main, ["train", str(root / "corpus.tsv"),
                                  "-o", str(root / "models")])
    assert result.exit_code == 0, result.output
    return root


class TestSynth:
    def test_writes_corpus(self, workspace):
        text = (workspace / "corpus.tsv").read_text(encoding="utf-8")
        assert text.startswith("S\t")
        assert "\nL\t" in text

    def test_bad_spec_exits_2(self, workspace, tmp_path):
        runner = CliRunner()
        bad = tmp_path / "bad.cfg"
        bad.write_text("group = robots:1:x:1\n", encoding="utf-8")
        result = runner.invoke(main, ["synth", str(bad),
                                      "-o", str(tmp_path / "c.tsv")])
        assert result.exit_code == 2

    def test_missing_file_exits_2(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(main, ["synth", str(tmp_path / "nope.cfg"),
                                      "-o", str(tmp_path / "c.tsv")])
        assert result.exit_code == 2


class TestTrain:
    def test_writes_models_and_manifest(self, workspace):
        models = sorted(p.name for p in (workspace / "models").glob("*.model"))
        assert models == ["boys00.model", "boys01.model",
                          "girls00.model", "girls01.model"]
        manifest = (workspace / "models" / "manifest.tsv").read_text("utf-8")
        assert manifest.startswith("serifu-manifest\tv1\tseed\t42\n")

    def test_seed_override_changes_manifest(self, workspace, tmp_path):
        runner = CliRunner()
        result = runner.invoke(main, ["train", str(workspace / "corpus.tsv"),
                                      "-o", str(tmp_path / "m"), "--seed", "7"])
        assert result.exit_code == 0, result.output
        manifest = (tmp_path / "m" / "manifest.tsv").read_text("utf-8")
        assert manifest.startswith("serifu-manifest\tv1\tseed\t7\n")

    def test_invalid_override_exits_2(self, workspace, tmp_path):
        runner = CliRunner()
        result = runner.invoke(main, ["train", str(workspace / "corpus.tsv"),
                                      "-o", str(tmp_path / "m"),
                                      "--eta-keep", "2.0"])
        assert result.exit_code == 2


class TestExtract:
    def test_report_and_table(self, workspace, tmp_path):
        runner = CliRunner()
        report = tmp_path / "report.tsv"
        table = tmp_path / "table.tsv"
        result = runner.invoke(main, [
            "extract", str(workspace / "corpus.tsv"),
            "--models", str(workspace / "models"), "--scheme", "gender",
            "-o", str(report), "--table", str(table)])
        assert result.exit_code == 0, result.output
        lines = report.read_text("utf-8").splitlines()
        assert all(line.split("\t")[0] == "gender" for line in lines)
        assert table.read_text("utf-8")

    def test_unknown_scheme_exits_2(self, workspace, tmp_path):
        runner = CliRunner()
        result = runner.invoke(main, [
            "extract", str(workspace / "corpus.tsv"),
            "--models", str(workspace / "models"), "--scheme", "dialect",
            "-o", str(tmp_path / "r.tsv")])
        assert result.exit_code == 2

    def test_empty_models_dir_exits_2(self, workspace, tmp_path):
        runner = CliRunner()
        (tmp_path / "empty").mkdir()
        result = runner.invoke(main, [
            "extract", str(workspace / "corpus.tsv"),
            "--models", str(tmp_path / "empty"), "--scheme", "gender",
            "-o", str(tmp_path / "r.tsv")])
        assert result.exit_code == 2


class TestExtractExternal:
    def test_report_written(self, tmp_path):
        runner = CliRunner()
        seg = tmp_path / "seg.tsv"
        seg.write_text("S\ta\tA\tw\tmale\tchild\nS\tb\tB\tw\tfemale\tadult\n"
                       "L\ta\tそう\tだぜ\nL\tb\tそう\tかしら\n", encoding="utf-8")
        report = tmp_path / "report.tsv"
        result = runner.invoke(main, ["extract-external", str(seg),
                                      "--scheme", "gender", "-o", str(report)])
        assert result.exit_code == 0, result.output
        assert "だぜ" in report.read_text("utf-8")

    def test_filter_flag_accepted(self, tmp_path):
        runner = CliRunner()
        seg = tmp_path / "seg.tsv"
        seg.write_text("S\ta\tA\tw\tmale\tchild\nS\tb\tB\tw\tfemale\tadult\n"
                       "L\ta\tだぜ\nL\tb\tかしら\n", encoding="utf-8")
        result = runner.invoke(main, ["extract-external", str(seg),
                                      "--scheme", "gender",
                                      "--no-log-prob-filter",
                                      "-o", str(tmp_path / "r.tsv")])
        assert result.exit_code == 0, result.output


class TestClassify:
    def test_writes_result(self, workspace, tmp_path):
        runner = CliRunner()
        out = tmp_path / "cv.tsv"
        result = runner.invoke(main, [
            "classify", str(workspace / "corpus.tsv"),
            "--models", str(workspace / "models"),
            "--config", str(workspace / "pipeline.cfg"), "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert "mean accuracy" in result.output
        assert out.read_text("utf-8").startswith("fold\taccuracy")

    def test_config_file_folds_respected(self, workspace, tmp_path):
        runner = CliRunner()
        out = tmp_path / "cv.tsv"
        result = runner.invoke(main, [
            "classify", str(workspace / "corpus.tsv"),
            "--models", str(workspace / "models"),
            "--config", str(workspace / "pipeline.cfg"), "-o", str(out)])
        assert result.exit_code == 0
        assert "over 2 folds" in result.output

    def test_bad_config_file_exits_2(self, workspace, tmp_path):
        runner = CliRunner()
        bad = tmp_path / "bad.cfg"
        bad.write_text("version = 1\nbogus = 1\n", encoding="utf-8")
        result = runner.invoke(main, [
            "classify", str(workspace / "corpus.tsv"),
            "--models", str(workspace / "models"),
            "--config", str(bad), "-o", str(tmp_path / "cv.tsv")])
        assert result.exit_code == 2
