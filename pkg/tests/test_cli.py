"""CLI subcommands and exit codes."""

import json

import pytest

from cargame import course as course_mod
from cargame.cli import main


@pytest.fixture
def course_file(tmp_path):
    path = tmp_path / "course.json"
    path.write_bytes(course_mod.save(course_mod.default_course()))
    return str(path)


class TestValidate:
    def test_valid_course(self, course_file, capsys):
        assert main(["validate", "--course", course_file]) == 0
        assert "valid" in capsys.readouterr().out

    def test_invalid_course(self, tmp_path, capsys):
        doc = json.loads(course_mod.save(course_mod.default_course()))
        doc["obstacles"] = [{"id": 0, "kind": "tree", "x": 99, "y": 0, "radius": 0.1}]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        assert main(["validate", "--course", str(path)]) == 1
        assert "violation" in capsys.readouterr().out

    def test_unparsable_course(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        assert main(["validate", "--course", str(path)]) == 1

    def test_missing_file(self, tmp_path):
        assert main(["validate", "--course", str(tmp_path / "none.json")]) == 1


class TestSimReplay:
    def test_headless_record_then_verify(self, tmp_path, capsys):
        log = str(tmp_path / "run.json")
        assert main(["sim", "--headless", "--duration", "5",
                     "--layout", "caster-locked", "--record", log]) == 0
        assert main(["replay", "--log", log, "--verify"]) == 0
        assert "OK" in capsys.readouterr().out

    def test_replay_without_verify(self, tmp_path, capsys):
        log = str(tmp_path / "run.json")
        main(["sim", "--headless", "--duration", "1", "--record", log])
        assert main(["replay", "--log", log]) == 0
        assert "replayed" in capsys.readouterr().out

    def test_tampered_log_rejected(self, tmp_path, capsys):
        log_path = tmp_path / "run.json"
        main(["sim", "--headless", "--duration", "1", "--record", str(log_path)])
        doc = json.loads(log_path.read_text())
        doc["trace"][3]["x"] = 42.0  # hash no longer matches
        log_path.write_text(json.dumps(doc))
        assert main(["replay", "--log", str(log_path), "--verify"]) == 1

    def test_rough_seeded_sim(self, tmp_path):
        log = str(tmp_path / "rough.json")
        assert main(["sim", "--headless", "--duration", "2", "--surface", "rough",
                     "--seed", "3", "--layout", "caster-locked",
                     "--record", log]) == 0
        assert main(["replay", "--log", log, "--verify"]) == 0

    def test_sim_with_course_file(self, course_file):
        assert main(["sim", "--headless", "--duration", "1",
                     "--course", course_file]) == 0

    def test_missing_log(self, tmp_path):
        assert main(["replay", "--log", str(tmp_path / "none.json")]) == 1


class TestUsage:
    def test_no_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as e:
            main([])
        assert e.value.code == 2

    def test_bad_choice_is_usage_error(self):
        with pytest.raises(SystemExit) as e:
            main(["sim", "--surface", "lunar"])
        assert e.value.code == 2


class TestConformance:
    def test_missing_port(self):
        assert main(["conformance", "--port", "/dev/not-a-real-port"]) == 1

    def test_pty_backed_board(self, tmp_path):
        """Emulate a flashed board behind a pty and run the vectors."""
        import os
        import threading

        from cargame import firmware, protocol

        master, slave = os.openpty()
        stop = threading.Event()

        def board():
            st = firmware.initial_state()
            os.set_blocking(master, False)
            while not stop.is_set():
                try:
                    data = os.read(master, 64)
                except BlockingIOError:
                    data = b""
                for b in data:
                    st = firmware.ingest_byte(st, b)
                st = firmware.step(st, 10.0)
                st, tx = firmware.drain_tx(st)
                if tx:
                    os.write(master, tx)
                stop.wait(0.001)

        thread = threading.Thread(target=board, daemon=True)
        thread.start()
        try:
            rc = main(["conformance", "--port", os.ttyname(slave),
                       "--timeout", "5", "--settle", "0.05"])
            assert rc == 0
        finally:
            stop.set()
            thread.join(timeout=2)
            os.close(master)
            os.close(slave)
