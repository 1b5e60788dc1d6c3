import re

import pytest

import synthetic
from subset_llda.cli import main
from subset_llda.corpus import write_corpus

SHORT = ["--iterations", "60", "--burnin", "50", "--lag", "5"]


@pytest.fixture(scope="module")
def workdir(tmp_path_factory, small_pair):
    d = tmp_path_factory.mktemp("cli")
    train, test = small_pair
    write_corpus(train, d / "train.txt")
    write_corpus(test, d / "test.txt")
    assert main(["train", "--train", str(d / "train.txt"), "--model", str(d / "model"), "--dep-topics", "3",
                 *SHORT]) == 0
    return d


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestTrain:
    def test_samples_retained_logged(self, tmp_path, capsys, workdir):
        code, _, err = run(capsys, "train", "--train", workdir / "train.txt", "--model", tmp_path / "m",
                           "--dep-topics", "0", *SHORT)
        assert code == 0
        assert "samples_retained=2" in err
        assert re.search(r"sweep=1 seconds=", err)
        assert (tmp_path / "m" / "meta").exists() and not (tmp_path / "m" / "aux").exists()

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(capsys, "train", "--train", tmp_path / "absent.txt", "--model", tmp_path / "m")
        assert code == 2
        assert "absent.txt" in err
        assert not (tmp_path / "m").exists()

    def test_malformed_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("1 2\n0 0:1\n")
        code, _, err = run(capsys, "train", "--train", bad, "--model", tmp_path / "m")
        assert code == 2 and "bad.txt:1" in err

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["train"])
        assert e.value.code == 1

    def test_bad_schedule_is_usage_error(self, workdir, tmp_path, capsys):
        code, _, _ = run(capsys, "train", "--train", workdir / "train.txt", "--model", tmp_path / "m",
                         "--iterations", "10", "--burnin", "50")
        assert code == 1


class TestPredict:
    def test_methods(self, workdir, tmp_path, capsys):
        for method in ("llda", "prior", "dep", "subset"):
            out = tmp_path / f"{method}.scores"
            code, _, err = run(capsys, "predict", "--model", workdir / "model", "--test", workdir / "test.txt",
                               "--method", method, "--train", workdir / "train.txt", "--output", out, *SHORT)
            assert code == 0, err
            assert len(out.read_text().splitlines()) == 30
            assert "wall_seconds=" in err

    def test_subset_logs_candidate_sizes(self, workdir, tmp_path, capsys):
        code, _, err = run(capsys, "predict", "--model", workdir / "model", "--test", workdir / "test.txt",
                           "--method", "subset", "--neighbors", "3", "--train", workdir / "train.txt",
                           "--output", tmp_path / "s", *SHORT)
        assert code == 0
        mean = float(re.search(r"candidates mean=([0-9.]+)", err).group(1))
        assert 1 <= mean < 12

    def test_candidates_file_and_all(self, workdir, tmp_path, capsys):
        cands = tmp_path / "cands.txt"
        assert run(capsys, "retrieve", "--train", workdir / "train.txt", "--test", workdir / "test.txt",
                   "--output", cands)[0] == 0
        common = ["predict", "--model", workdir / "model", "--test", workdir / "test.txt", *SHORT]
        assert run(capsys, *common, "--method", "subset", "--candidates", cands, "--output", tmp_path / "a")[0] == 0
        assert run(capsys, *common, "--method", "subset", "--train", workdir / "train.txt",
                   "--output", tmp_path / "b")[0] == 0
        assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()
        assert run(capsys, *common, "--method", "subset", "--candidates", "all", "--output", tmp_path / "c")[0] == 0
        assert run(capsys, *common, "--method", "llda", "--output", tmp_path / "d")[0] == 0
        assert (tmp_path / "c").read_bytes() == (tmp_path / "d").read_bytes()

    def test_dep_without_aux(self, workdir, tmp_path, capsys):
        run(capsys, "train", "--train", workdir / "train.txt", "--model", tmp_path / "m", "--dep-topics", "0",
            *SHORT)
        code, _, err = run(capsys, "predict", "--model", tmp_path / "m", "--test", workdir / "test.txt",
                           "--method", "dep", "--output", tmp_path / "x", *SHORT)
        assert code == 1 and "auxiliary" in err
        assert not (tmp_path / "x").exists()

    def test_subset_without_candidates(self, workdir, tmp_path, capsys):
        code, _, err = run(capsys, "predict", "--model", workdir / "model", "--test", workdir / "test.txt",
                           "--method", "subset", *SHORT)
        assert code == 1

    def test_corrupt_model(self, workdir, tmp_path, capsys):
        (tmp_path / "m").mkdir()
        (tmp_path / "m" / "meta").write_text("magic=nope\n")
        code, _, _ = run(capsys, "predict", "--model", tmp_path / "m", "--test", workdir / "test.txt")
        assert code == 2

    def test_deterministic(self, workdir, tmp_path, capsys):
        for name in ("a", "b"):
            run(capsys, "predict", "--model", workdir / "model", "--test", workdir / "test.txt", "--method", "dep",
                "--seed", "4", "--output", tmp_path / name, *SHORT)
        assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


class TestEvaluate:
    @pytest.fixture
    def scores(self, workdir, tmp_path, capsys):
        out = tmp_path / "llda.scores"
        run(capsys, "predict", "--model", workdir / "model", "--test", workdir / "test.txt", "--method", "llda",
            "--output", out, *SHORT)
        return out

    def test_key_values(self, workdir, scores, capsys):
        code, out, _ = run(capsys, "evaluate", "--scores", scores, "--gold", workdir / "test.txt",
                           "--model", workdir / "model", "--k", "1,5", "--format", "kv")
        assert code == 0
        keys = [line.split("=")[0] for line in out.splitlines()]
        assert keys == ["micro_f", "macro_f", "p@1", "p@5", "psp@1", "psp@5", "rcut_t"]

    def test_perfect_scores(self, workdir, tmp_path, small_pair, capsys):
        _, test = small_pair
        perfect = tmp_path / "perfect.scores"
        perfect.write_text("".join(f"{d.doc_id}\t" + " ".join(f"{l}:0.5" for l in d.labels) + "\n" for d in test))
        code, out, _ = run(capsys, "evaluate", "--scores", perfect, "--gold", workdir / "test.txt",
                           "--train", workdir / "train.txt", "--k", "1", "--unit-propensities", "--format", "kv")
        assert code == 0
        values = dict(line.split("=") for line in out.splitlines())
        assert all(float(values[k]) == 1.0 for k in ("micro_f", "macro_f", "p@1", "psp@1"))

    def test_compare(self, workdir, scores, capsys):
        code, out, _ = run(capsys, "evaluate", "--scores", scores, "--gold", workdir / "test.txt",
                           "--model", workdir / "model", "--compare", scores)
        assert code == 0 and "ztest_p@1" in out

    def test_count_mismatch(self, workdir, scores, tmp_path, capsys):
        short = tmp_path / "short.scores"
        short.write_text("".join(scores.read_text().splitlines(keepends=True)[:5]))
        code, _, err = run(capsys, "evaluate", "--scores", short, "--gold", workdir / "test.txt",
                           "--model", workdir / "model")
        assert code == 2 and "5 documents" in err

    def test_needs_training_info(self, workdir, scores, capsys):
        code, _, _ = run(capsys, "evaluate", "--scores", scores, "--gold", workdir / "test.txt")
        assert code == 1

    def test_report_deterministic(self, workdir, scores, capsys):
        argv = ["evaluate", "--scores", scores, "--gold", workdir / "test.txt", "--model", workdir / "model"]
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


class TestReproduce:
    def test_table_shape(self, tmp_path, capsys):
        train = synthetic.generate(80, 8, 40, cardinality=2, tokens=12, seed=1)
        test = synthetic.generate(20, 8, 40, cardinality=2, tokens=12, seed=2, role="test")
        write_corpus(train, tmp_path / "bibtex_train.txt")
        write_corpus(test, tmp_path / "bibtex_test.txt")
        code, out, err = run(capsys, "reproduce", "--dataset", "bibtex", "--workdir", tmp_path, "--runs", "2",
                             "--dep-topics", "3", *SHORT)
        assert code == 0, err
        lines = out.splitlines()
        assert lines[1].split() == ["llda", "prior", "dep", "subset"]
        assert [l.split()[0] for l in lines[2:]] == ["micro_f", "macro_f", "p@1", "p@5", "psp@1", "psp@5"]
        assert all(len(l.split()) == 5 for l in lines[2:])
        assert (tmp_path / "bibtex_results.txt").read_text() == out
        assert (tmp_path / "bibtex_subset_seed1.scores").exists()

    def test_missing_dataset(self, tmp_path, capsys):
        code, _, err = run(capsys, "reproduce", "--dataset", "delicious", "--workdir", tmp_path)
        assert code == 2 and "delicious_train.txt" in err
