"""CLI: subcommands, exit codes, JSON output, file inputs, and the remote
dispatch path against a live server."""

import json
import socket
import threading
import time

import pytest

from orthogon.cli import main


def run_cli(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_lift_pass_exit_zero(capsys):
    code, out, _ = run_cli(capsys, "lift", "--left", "{}-->{x}", "--right", "{o->c}-->{o=c}")
    assert code == 0 and "True" in out


def test_lift_fail_exit_one(capsys):
    code, out, _ = run_cli(
        capsys, "lift", "--left", "{a,b}-->{a=b}", "--right", "{a<-u->b}-->{a=u=b}"
    )
    assert code == 1 and "unfillable square" in out


def test_lift_witness_counts(capsys):
    code, out, _ = run_cli(
        capsys,
        "--json",
        "lift",
        "--left",
        "{}-->{x}",
        "--right",
        "{o->c}-->{o=c}",
        "--witness",
    )
    data = json.loads(out)
    assert code == 0 and data["filler_counts"]


def test_parse_echo(capsys):
    code, out, _ = run_cli(capsys, "parse", "{a<->b}-->{a=b}")
    assert code == 0 and out.startswith("Map:")


def test_usage_error_exit_two(capsys):
    code, _, err = run_cli(capsys, "parse", "{a->}")
    assert code == 2 and "error" in err


def test_unknown_subcommand_exit_two(capsys):
    assert main(["frobnicate"]) == 2


def test_member_exit_codes(capsys):
    code, out, _ = run_cli(
        capsys,
        "member",
        "--class",
        "[{a<-u->b}-->{a=u=b}]_<5^lr",
        "--map",
        "{o}-->{o->c}",
    )
    assert code == 1 and "NotMember" in out
    code, out, _ = run_cli(
        capsys,
        "member",
        "--class",
        "[{a,b}-->{a=b}]_<4^l",
        "--map",
        "{o->c}-->{o=c}",
    )
    assert code == 0 and "MemberAtBound" in out


def test_enumerate_json(capsys):
    code, out, _ = run_cli(capsys, "--json", "enumerate", "--points", "3", "--upto-iso")
    data = json.loads(out)
    assert code == 0 and data["count"] == 9


def test_verify_s5(capsys):
    code, out, _ = run_cli(capsys, "verify", "S5")
    assert code == 0 and "PASS" in out


def test_render_space_dot(capsys):
    code, out, _ = run_cli(capsys, "render", "--space", "{a<-u->b}", "--dot")
    assert code == 0 and out.startswith("digraph")


def test_render_map_text(capsys):
    code, out, _ = run_cli(capsys, "render", "--map", "{c}-->{o->c}")
    assert code == 0 and out.strip() == "{c}-->{o->c}"


def test_orbit_human_output(capsys):
    code, out, _ = run_cli(
        capsys, "orbit", "--gen", "{}-->{x}", "--bound", "2", "--max-word", "2"
    )
    assert code == 0 and "classes" in out


def test_catalog_listing(capsys):
    code, out, _ = run_cli(capsys, "catalog")
    assert code == 0 and "M_to_L" in out


def test_map_from_json_file(tmp_path, capsys):
    payload = {
        "domain": {"points": ["o", "c"], "arrows": [["o", "c"]]},
        "codomain": {"points": ["p"], "arrows": []},
        "assign": {"o": "p", "c": "p"},
    }
    path = tmp_path / "map.json"
    path.write_text(json.dumps(payload))
    code, out, _ = run_cli(capsys, "lift", "--left", "{}-->{x}", "--right", f"@{path}")
    assert code == 0


def test_missing_file_exit_two(capsys):
    code, _, err = run_cli(capsys, "lift", "--left", "@/nonexistent.json", "--right", "{o->c}-->{o=c}")
    assert code == 2


@pytest.fixture(scope="module")
def live_server():
    import uvicorn

    from orthogon.service import fastapi_app

    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    config = uvicorn.Config(fastapi_app, host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.05)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def test_cli_against_live_server(live_server, capsys):
    code, out, _ = run_cli(
        capsys,
        "--server",
        live_server,
        "lift",
        "--left",
        "{}-->{x}",
        "--right",
        "{o->c}-->{o=c}",
    )
    assert code == 0 and "True" in out
    code, out, _ = run_cli(capsys, "--server", live_server, "--json", "catalog")
    assert code == 0 and "K_to_sierp" in out
    code, _, err = run_cli(capsys, "--server", live_server, "parse", "{a->}")
    assert code == 2
