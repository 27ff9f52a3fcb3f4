import json
import os

import pytest

from williamson.cli import RunConfig, main, run_enumeration, smallest_prime_divisor
from williamson.equivalence import canonical_key, dedupe
from williamson.oracle import brute_force_enumerate
from williamson.seqcore import format_block, read_quadruples


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_smallest_prime_divisor():
    assert smallest_prime_divisor(6) == 2
    assert smallest_prime_divisor(9) == 3
    assert smallest_prime_divisor(35) == 5


class TestRunConfig:
    def test_validation(self):
        from williamson.cli import DomainError

        with pytest.raises(DomainError):
            RunConfig(n=0)
        with pytest.raises(DomainError):
            RunConfig(n=6, epsilon=0)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("WILLIAMSON_WORKERS", "3")
        assert RunConfig(n=6).workers == 3


class TestEnumerate:
    def test_unsupported_order_is_domain_error(self, capsys):
        code, out, err = run_cli(capsys, "enumerate", "--order", "25")
        assert code == 1
        assert "unsupported" in err

    def test_n2_summary_line(self, capsys):
        code, out, err = run_cli(capsys, "enumerate", "--order", "2")
        assert code == 0
        assert "inequivalent=1" in out

    def test_outputs_written(self, tmp_path, capsys):
        out_dir = str(tmp_path / "run")
        code, out, err = run_cli(capsys, "enumerate", "--order", "6", "--out", out_dir, "--dump-cnf")
        assert code == 0
        assert os.path.exists(os.path.join(out_dir, "solutions.txt"))
        assert os.path.exists(os.path.join(out_dir, "canonical.txt"))
        summary = open(os.path.join(out_dir, "summary.tsv")).read().splitlines()
        assert summary[0].split("\t") == ["n", "seconds", "instances", "solutions", "inequivalent"]
        row = summary[1].split("\t")
        assert row[0] == "6" and row[4] == "1"
        stats = open(os.path.join(out_dir, "stats.tsv")).read().splitlines()
        assert len(stats) == 1 + int(row[2])
        cnfs = os.listdir(os.path.join(out_dir, "instances"))
        assert len(cnfs) == int(row[2]) and all(f.endswith(".cnf") for f in cnfs)
        from williamson.satgen import parse_dimacs

        parse_dimacs(open(os.path.join(out_dir, "instances", cnfs[0])).read())

    def test_determinism(self, tmp_path):
        a = run_enumeration(RunConfig(n=9, out_dir=str(tmp_path / "a")))
        b = run_enumeration(RunConfig(n=9, out_dir=str(tmp_path / "b")))
        assert [canonical_key(q) for q in a.canonical] == [canonical_key(q) for q in b.canonical]
        assert open(tmp_path / "a" / "canonical.txt").read() == open(tmp_path / "b" / "canonical.txt").read()

    def test_resume_from_checkpoint(self, tmp_path):
        out_dir = str(tmp_path / "run")
        first = run_enumeration(RunConfig(n=9, out_dir=out_dir))
        assert first.solved_this_run == first.instance_count > 0

        # simulate a killed run: keep only a truncated checkpoint
        ckpt = os.path.join(out_dir, "checkpoint.jsonl")
        lines = open(ckpt).read().splitlines()
        open(ckpt, "w").write("\n".join(lines[: len(lines) // 2]) + "\n")
        for name in ("solutions.txt", "canonical.txt", "summary.tsv", "stats.tsv"):
            os.unlink(os.path.join(out_dir, name))

        second = run_enumeration(RunConfig(n=9, out_dir=out_dir))
        assert second.solved_this_run == first.instance_count - len(lines) // 2
        assert second.inequivalent_count == first.inequivalent_count
        assert len(second.solutions) == len(first.solutions)

    def test_parallel_workers_match_serial(self, tmp_path):
        serial = run_enumeration(RunConfig(n=12, workers=1))
        parallel = run_enumeration(RunConfig(n=12, workers=2))
        assert {canonical_key(q) for q in serial.canonical} == {
            canonical_key(q) for q in parallel.canonical
        }
        assert len(serial.solutions) == len(parallel.solutions)

    def test_oracle_equivalence_via_cli_paths(self):
        report = run_enumeration(RunConfig(n=3))
        oracle_classes = dedupe(brute_force_enumerate(3))
        assert {canonical_key(q) for q in report.canonical} == {
            canonical_key(q) for q in oracle_classes
        }


class TestVerify:
    def test_good_and_corrupted_blocks(self, tmp_path, capsys):
        q = dedupe(brute_force_enumerate(3))[0]
        good = format_block(q.members)
        lines = good.splitlines()
        corrupted = "\n".join(lines[:3] + [("-" if lines[3][0] == "+" else "+") + lines[3][1:]])
        path = tmp_path / "seqs.txt"
        path.write_text(good + "\n\n" + corrupted + "\n")
        code, out, err = run_cli(capsys, "verify", str(path))
        assert code == 1  # one bad block
        assert "block 1\torder 3\tWILLIAMSON" in out
        assert "block 2\torder 3\tNOT-WILLIAMSON" in out

    def test_all_ones_order_one(self, tmp_path, capsys):
        path = tmp_path / "one.txt"
        path.write_text("+\n+\n+\n+\n")
        code, out, err = run_cli(capsys, "verify", str(path))
        assert code == 0 and "WILLIAMSON" in out

    def test_parse_error_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("+x\n")
        code, out, err = run_cli(capsys, "verify", str(path))
        assert code == 1 and "line 1" in err


class TestOtherCommands:
    def test_decompose(self, capsys):
        code, out, err = run_cli(capsys, "decompose", "2")
        assert code == 0 and out.strip() == "0 0 2 2"

    def test_canonicalize_idempotent(self, tmp_path, capsys):
        qs = brute_force_enumerate(2)[:5]
        path = tmp_path / "qs.txt"
        with open(path, "w") as f:
            from williamson.seqcore import write_blocks

            write_blocks(f, (q.members for q in qs))
        code, first, err = run_cli(capsys, "canonicalize", str(path))
        assert code == 0
        path2 = tmp_path / "canon.txt"
        path2.write_text(first)
        code, second, err = run_cli(capsys, "canonicalize", str(path2))
        assert second == first

    def test_oracle_matches_enumerate(self, capsys):
        code, out, err = run_cli(capsys, "oracle", "--order", "3")
        assert code == 0
        header = out.splitlines()[0]
        assert "inequivalent=1" in header
        blocks = read_quadruples(out.splitlines()[1:])
        report = run_enumeration(RunConfig(n=3))
        assert {canonical_key(q) for q in blocks} == {canonical_key(q) for q in report.canonical}

    def test_oracle_budget_error(self, capsys):
        code, out, err = run_cli(capsys, "oracle", "--order", "14")
        assert code == 1 and "budget" in err

    def test_double_cli(self, tmp_path, capsys):
        q = dedupe(brute_force_enumerate(3))[0]
        path = tmp_path / "q3.txt"
        path.write_text(format_block(q.members) + "\n")
        code, out, err = run_cli(capsys, "double", str(path))
        assert code == 0
        doubled = read_quadruples(out.splitlines())
        assert doubled[0].order == 6

    def test_extract8_cli(self, tmp_path, capsys):
        q = dedupe(brute_force_enumerate(6))[0]
        path = tmp_path / "q6.txt"
        path.write_text(format_block(q.members) + "\n")
        code, out, err = run_cli(capsys, "extract8", str(path))
        assert code == 0
        lines = [l for l in out.splitlines() if l.strip()]
        assert len(lines) == 8 and all(len(l) == 3 for l in lines)

    def test_hadamard_cli(self, tmp_path, capsys):
        q = dedupe(brute_force_enumerate(2))[0]
        path = tmp_path / "q2.txt"
        path.write_text(format_block(q.members) + "\n")
        code, out, err = run_cli(capsys, "hadamard", str(path), "--print-matrix")
        assert code == 0 and "hadamard order 8" in out
        rows = [l for l in out.splitlines() if set(l) <= {"+", "-"} and l]
        assert len(rows) == 8

    def test_stats_command(self, tmp_path, capsys):
        out_dir = str(tmp_path / "run")
        run_enumeration(RunConfig(n=6, out_dir=out_dir))
        code, out, err = run_cli(capsys, "stats", out_dir)
        assert code == 0
        assert out.startswith("n\tseconds") and "total_conflicts=" in out

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["enumerate"])  # missing --order
        assert exc.value.code == 2

    def test_checkpoint_format_is_json_lines(self, tmp_path):
        out_dir = str(tmp_path / "run")
        run_enumeration(RunConfig(n=6, out_dir=out_dir))
        with open(os.path.join(out_dir, "checkpoint.jsonl")) as f:
            for line in f:
                rec = json.loads(line)
                assert set(rec) == {"id", "solutions", "stats"}
