import io
import sys
from contextlib import redirect_stdout, redirect_stderr

import pytest

from ixspace import formats
from ixspace.chain import ChainComplex, ChainMap, homology
from ixspace.cli import main
from ixspace.fixtures import d4xs1_wittspec, simplex_boundary
from ixspace.qlinalg import RationalMatrix
from ixspace.formats import ParseError


def run_cli(argv):
    out = io.StringIO()
    err = io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def test_chain_round_trip():
    c = ChainComplex(0, [1, 2, 1], {2: RationalMatrix([[1], [-1]]),
                                    1: RationalMatrix([[0, 0]])})
    text = formats.emit_chain("c", c)
    doc = formats.parse(text)
    assert doc.kind == "chain" and doc.payload == c
    # parse(emit(parse)) is parse
    assert formats.emit_chain("c", doc.payload) == text


def test_map_round_trip():
    c = ChainComplex(0, [1, 1])
    f = ChainMap.identity(c)
    text = formats.emit_chain("c", c) + formats.emit_map("f", f, "c", "c")
    docs = formats.parse_documents(text)
    assert docs[1].payload == f


def test_simplicial_round_trip_with_sub():
    from ixspace.fixtures import disc_pair
    pair = disc_pair()
    text = formats.emit_simplicial("d2", pair.ambient, pair.sub)
    doc = formats.parse(text)
    assert doc.payload.ambient == pair.ambient
    assert doc.payload.sub == pair.sub


def test_parse_error_names_degree():
    text = "\n".join([
        "begin chain c",
        "degrees 0 1",
        "ranks 1 2",
        "boundary 1",
        "0 0 0",
        "end",
    ])
    with pytest.raises(ParseError) as exc:
        formats.parse(text)
    assert "degree 1" in str(exc.value)


def test_parse_rejects_wrong_shape_dd():
    text = "\n".join([
        "begin chain c",
        "degrees 0 2",
        "ranks 1 1 1",
        "boundary 1",
        "1",
        "boundary 2",
        "1",
        "end",
    ])
    with pytest.raises(ParseError):
        formats.parse(text)


def test_free_cdga_round_trip():
    text = "\n".join([
        "begin cdga fam",
        "type free",
        "cap 13",
        "generator x 3",
        "generator y 3",
        "generator z 5",
        "d z = x*y",
        "end",
    ]) + "\n"
    doc = formats.parse(text)
    m = doc.payload
    assert [d for _, d in m.generators] == [3, 3, 5]
    assert formats.emit_free_cdga("fam", m) == text
    assert m.cohomology(8).dim == 2


def test_table_cdga_round_trip():
    from ixspace.fixtures import odd_triple_cdga
    a = odd_triple_cdga(3, cap=13)
    text = formats.emit_table_cdga("fam", a)
    doc = formats.parse(text)
    b = doc.payload
    for i in range(0, 12):
        assert a.cohomology(i).dim == b.cohomology(i).dim


def test_cli_deterministic_output(tmp_path):
    code1, out1, _ = run_cli(["gen-example", "wittspec", "--fixture", "d4xs1"])
    code2, out2, _ = run_cli(["gen-example", "wittspec", "--fixture", "d4xs1"])
    assert code1 == code2 == 0 and out1 == out2
    f = tmp_path / "ws.txt"
    f.write_text(out1)
    c1, r1, _ = run_cli(["complete", str(f)])
    c2, r2, _ = run_cli(["complete", str(f)])
    assert c1 == c2 == 0 and r1 == r2


def test_cli_homology_command(tmp_path):
    text = formats.emit_chain("c", simplex_boundary(3).chain_complex())
    f = tmp_path / "c.txt"
    f.write_text(text)
    code, out, _ = run_cli(["homology", str(f), "--degree", "3"])
    assert code == 0 and "dim 1" in out


def test_cli_cone_and_torus(tmp_path):
    c = ChainComplex(0, [1, 1])
    text = formats.emit_chain("c", c) + \
        formats.emit_map("f", ChainMap.identity(c), "c", "c")
    f = tmp_path / "m.txt"
    f.write_text(text)
    code, out, _ = run_cli(["cone", str(f)])
    assert code == 0 and "pass" in out
    code, out, _ = run_cli(["torus", str(f)])
    assert code == 0 and "euler characteristic: 0" in out and "pass" in out


def test_cli_truncate(tmp_path):
    text = formats.emit_chain("c", simplex_boundary(3).chain_complex())
    f = tmp_path / "c.txt"
    f.write_text(text)
    code, out, _ = run_cli(["truncate", str(f), "--degree", "2"])
    assert code == 0 and "verified" in out
    # the emitted block parses back
    start = out.index("begin chain")
    doc = formats.parse(out[start:])
    assert homology(doc.payload, 0).dim == 1
    assert all(homology(doc.payload, i).dim == 0
               for i in range(1, doc.payload.top + 1))


def test_cli_obstructions_pipeline(tmp_path):
    code, out, _ = run_cli(["gen-example", "torus", "--link", "s3",
                            "--monodromy", "id"])
    f = tmp_path / "b.txt"
    f.write_text(out)
    code, out, _ = run_cli(["obstructions", str(f), "--n", "5"])
    assert code == 0
    assert "all obstruction spaces vanish" in out


def test_cli_minimal_model_pipeline(tmp_path):
    code, out, _ = run_cli(["gen-example", "sullivan", "--u", "3"])
    f = tmp_path / "a.txt"
    f.write_text(out)
    code, out, _ = run_cli(["minimal-model", str(f), "--cap", "11"])
    assert code == 0
    assert "generators in degree 3: 2" in out
    assert "generators in degree 5: 1" in out


def test_cli_zeta_witness_cycle(tmp_path):
    fam = tmp_path / "fam.txt"
    fam.write_text("\n".join([
        "begin cdga fam",
        "type free",
        "cap 13",
        "generator x 3",
        "generator y 3",
        "generator z 5",
        "d z = x*y",
        "end",
    ]) + "\n")
    code, out, _ = run_cli(["zeta", str(fam), "--degree", "8"])
    assert code == 1 and "not injective" in out
    rep = tmp_path / "rep.txt"
    rep.write_text(out)
    code, out, _ = run_cli(["zeta", str(fam), "--check-witness", str(rep),
                            "--command-context", "zeta", "--degree", "8"])
    assert code == 0 and "confirmed" in out


def test_cli_verify_pd_exit_codes(tmp_path):
    code, out, _ = run_cli(["gen-example", "simplicial", "--fixture", "d2"])
    f = tmp_path / "d2.txt"
    f.write_text(out)
    code, out, _ = run_cli(["verify-pd", str(f)])
    assert code == 0 and "verified" in out


def test_cli_complete_refusal_with_witness(tmp_path):
    code, out, _ = run_cli(["gen-example", "wittspec", "--fixture", "d4xs1"])
    ws = tmp_path / "ws.txt"
    ws.write_text(out)
    # zero witness for the single stratum: refusal with embedded witness
    spec = d4xs1_wittspec()
    zero = ["0"] * spec.strata[0].cone.rank(spec.n - 1)
    wfile = tmp_path / "w.txt"
    wfile.write_text("begin witness w\nkind class\ndegree 4\nvector "
                     + " ".join(zero) + "\nend\n")
    code, out, _ = run_cli(["complete", str(ws), "--witness", str(wfile)])
    assert code == 1 and "refused" in out and "begin witness" in out
    rep = tmp_path / "rep.txt"
    rep.write_text(out)
    code, out, _ = run_cli(["complete", str(ws), "--check-witness", str(rep)])
    assert code == 0 and "confirmed" in out


def test_cli_signature_command(tmp_path):
    code, out, _ = run_cli(["gen-example", "simplicial", "--fixture", "cp2-like"])
    f = tmp_path / "cp2.txt"
    f.write_text(out)
    code, out, _ = run_cli(["signature", str(f)])
    assert code == 0 and "signature: 1" in out


def test_cli_input_error_exit_2(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("begin chain c\nranks 1\nend\n")
    code, out, err = run_cli(["homology", str(f)])
    assert code == 2 and "error" in err


def test_cli_malformed_boundary_names_degree(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("begin chain c\ndegrees 0 1\nranks 1 2\nboundary 1\n0\nend\n")
    code, out, err = run_cli(["homology", str(f)])
    assert code == 2 and "degree 1" in err
