import io
import math

import numpy as np
import pytest

from cpflow import (FlowConfig, ParseError, Prescription, fixtures,
                    instance_digest, make_synthetic, parse_instance, run,
                    serialize_instance)
from cpflow.instancefile import parse_angle, write_solution, write_trace

TETRA_DOC = """\
# four circles, all crossings orthogonal
[vertices]
a b c d

[edges]
ab a b pi/2
ac a c pi/2
ad a d pi/2
bc b c pi/2
bd b d pi/2
cd c d pi/2

[faces]
bcd bc cd bd
acd ac cd ad
abd ab bd ad
abc ab bc ac

[prescription]
a 4.05306515313624
b 4.05306515313624
c 4.05306515313624
d 4.05306515313624
"""


class TestParseAngle:
    @pytest.mark.parametrize("token,value", [
        ("pi", math.pi),
        ("pi/2", math.pi / 2),
        ("3pi/4", 3 * math.pi / 4),
        ("2pi/3", 2 * math.pi / 3),
        ("0.25pi", 0.25 * math.pi),
        ("1.5707963267948966", 1.5707963267948966),
    ])
    def test_values(self, token, value):
        assert parse_angle(token) == pytest.approx(value, rel=1e-16)

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_angle("pie")
        with pytest.raises(ValueError):
            parse_angle("pi/0")


class TestParse:
    def test_tetrahedron_document(self):
        inst = parse_instance(TETRA_DOC)
        c = inst.complex
        assert c.n_vertices == 4 and c.n_edges == 6 and c.n_faces == 4
        assert c.vertex_names == ("a", "b", "c", "d")
        assert np.all(c.phi == math.pi / 2)
        assert c.is_valid
        assert inst.prescription is not None
        assert np.all(inst.prescription.lhat == 4.05306515313624)
        assert inst.initial_k is None

    def test_round_trip_structural_equality(self):
        inst = parse_instance(TETRA_DOC)
        text = serialize_instance(inst.complex, inst.prescription)
        again = parse_instance(text)
        assert again.complex == inst.complex
        assert again.prescription == inst.prescription

    def test_round_trip_byte_identical(self):
        inst = parse_instance(TETRA_DOC)
        text = serialize_instance(inst.complex, inst.prescription)
        assert serialize_instance(parse_instance(text).complex,
                                  parse_instance(text).prescription) == text

    def test_seventeen_digit_round_trip(self):
        c = fixtures.tetrahedron(phi=np.pi / 2 - 0.123456789012345e-3)
        inst = make_synthetic(c, seed=90)
        text = serialize_instance(c, inst.prescription, initial_k=inst.kbar)
        again = parse_instance(text)
        assert np.all(again.complex.phi == c.phi)
        assert np.all(again.prescription.lhat == inst.prescription.lhat)
        assert np.all(again.initial_k == inst.kbar)

    def test_initial_radii_converted(self):
        doc = TETRA_DOC + "\n[initial_r]\n" + "\n".join(
            f"{v} 0.78539816339744828" for v in "abcd") + "\n"
        inst = parse_instance(doc)
        assert np.allclose(inst.initial_k, 0.0, atol=1e-15)

    @pytest.mark.parametrize("mangle,expected_line", [
        (lambda s: s.replace("[vertices]", "[vertebrae]"), 2),
        (lambda s: s.replace("ab a b pi/2", "ab a b"), 6),
        (lambda s: s.replace("ab a b pi/2", "ab a b halfpi"), 6),
        (lambda s: "stray\n" + s, 1),
    ])
    def test_errors_carry_line_numbers(self, mangle, expected_line):
        with pytest.raises(ParseError) as exc_info:
            parse_instance(mangle(TETRA_DOC))
        assert exc_info.value.line == expected_line

    def test_duplicate_names(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_instance(TETRA_DOC.replace("ac a c pi/2", "ab a c pi/2"))
        with pytest.raises(ParseError, match="duplicate"):
            parse_instance(TETRA_DOC.replace("a b c d", "a b c c"))

    def test_unknown_references(self):
        with pytest.raises(ParseError):
            parse_instance(TETRA_DOC.replace("ab a b pi/2", "ab a z pi/2"))
        with pytest.raises(ParseError):
            parse_instance(TETRA_DOC.replace("bcd bc cd bd", "bcd bc cd zz"))

    def test_prescription_coverage(self):
        with pytest.raises(ParseError, match="missing"):
            parse_instance(TETRA_DOC.replace("d 4.05306515313624\n", ""))
        with pytest.raises(ParseError, match="unknown"):
            parse_instance(TETRA_DOC + "z 1.0\n")

    def test_initial_exclusivity(self):
        doc = TETRA_DOC + "\n[initial_k]\na 0\nb 0\nc 0\nd 0\n\n[initial_r]\na 0.7\n"
        with pytest.raises(ParseError, match="mutually exclusive"):
            parse_instance(doc)

    def test_empty_document(self):
        with pytest.raises(ParseError):
            parse_instance("# nothing here\n")

    def test_prescription_optional(self):
        head = TETRA_DOC.split("[prescription]")[0]
        inst = parse_instance(head)
        assert inst.prescription is None


class TestReports:
    def _solved(self):
        inst = parse_instance(TETRA_DOC)
        config = FlowConfig(integrator="rk4", step=0.05, tol_ode=1e-6,
                            tol_curvature=1e-9)
        trace = run(inst.complex, inst.prescription,
                    np.array([0.4, -0.3, 0.2, 0.0]), config)
        return inst, config, trace

    def test_trace_file(self):
        inst, config, trace = self._solved()
        buf = io.StringIO()
        write_trace(buf, trace, inst.complex, inst.prescription, config)
        text = buf.getvalue()
        lines = text.splitlines()
        assert lines[0] == "# cpflow trace v1"
        assert any(l.startswith("# verdict converged") for l in lines)
        digest = instance_digest(inst.complex, inst.prescription)
        assert f"# instance sha256:{digest}" in lines
        rows = [l for l in lines if not l.startswith("#")]
        assert len(rows) == len(trace.samples)
        ts = [float(r.split("\t")[0]) for r in rows]
        assert all(b > a for a, b in zip(ts, ts[1:]))

    def test_trace_deterministic(self):
        inst, config, trace = self._solved()
        a, b = io.StringIO(), io.StringIO()
        write_trace(a, trace, inst.complex, inst.prescription, config)
        _, config2, trace2 = self._solved()
        write_trace(b, trace2, inst.complex, inst.prescription, config2)
        assert a.getvalue() == b.getvalue()

    def test_solution_file(self):
        inst, config, trace = self._solved()
        buf = io.StringIO()
        write_solution(buf, trace, inst.complex, inst.prescription)
        text = buf.getvalue()
        assert "[vertices]" in text and "[faces]" in text
        assert "# verdict converged" in text
        # all radii near pi/4 for the planted uniform instance
        for line in text.split("[vertices]")[1].split("[faces]")[0].splitlines():
            if line and not line.startswith("#"):
                name, K, r, L, alpha = line.split()
                assert abs(float(r) - math.pi / 4) < 1e-6
                assert abs(float(L) - 4.05306515313624) < 1e-6

    def test_digest_tracks_content(self):
        inst = parse_instance(TETRA_DOC)
        d1 = instance_digest(inst.complex, inst.prescription)
        d2 = instance_digest(inst.complex, None)
        assert d1 != d2
        assert d1 == instance_digest(inst.complex, inst.prescription)

    def test_diverged_trace_carries_certificate(self):
        from conftest import single_vertex_violator
        name, complex, bad, v = single_vertex_violator(4)
        config = FlowConfig(method="curvature", tol_ode=1e-4)
        trace = run(complex, bad, np.zeros(complex.n_vertices), config)
        buf = io.StringIO()
        write_trace(buf, trace, complex, bad, config)
        text = buf.getvalue()
        assert "# verdict diverged" in text
        assert "# certificate_subset" in text
        assert "# certificate_margin" in text
