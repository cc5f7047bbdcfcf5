import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from groundtrack import io
from groundtrack.errors import DuplicateFrame, NegativeDimensions, ParseError, SingularHomography
from groundtrack.geometry import AffineMotion, Homography
from groundtrack.image_filter import BBox
from groundtrack.tracker import FrameResult, OutputRow


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_detection_row(tmp_path):
    dets = io.read_detections(write(tmp_path, "d.txt", "1,-1,10,20,30,40,0.9,-1,-1,-1\n"))
    (d,) = dets[1]
    assert d.box.ltwh == (10.0, 20.0, 30.0, 40.0) and d.conf == 0.9


def test_detections_sorted_and_conf_defaults(tmp_path):
    dets = io.read_detections(write(tmp_path, "d.txt", "3,1,0,0,1,1\n1,1,0,0,1,1,0.5\n"))
    assert list(dets) == [1, 3]
    assert dets[3][0].conf == 1.0


def test_empty_detection_file(tmp_path):
    assert io.read_detections(write(tmp_path, "d.txt", "")) == {}


def test_detection_errors_carry_line_numbers(tmp_path):
    with pytest.raises(ParseError) as exc:
        io.read_detections(write(tmp_path, "d.txt", "1,-1,0,0,1,1,0.9\n2,-1,a,0,1,1,0.9\n"))
    assert exc.value.line == 2
    with pytest.raises(ParseError) as exc:
        io.read_detections(write(tmp_path, "d.txt", "1,-1,0,0\n"))
    assert exc.value.line == 1
    with pytest.raises(ParseError):
        io.read_detections(write(tmp_path, "d.txt", "1.5,-1,0,0,1,1\n"))


def test_negative_size_warns_and_clamps(tmp_path):
    with pytest.warns(NegativeDimensions):
        dets = io.read_detections(write(tmp_path, "d.txt", "1,-1,10,10,-5,4,0.9\n"))
    assert dets[1][0].box.ltwh == (10.0, 10.0, 0.0, 4.0)


def test_homography_examples(tmp_path):
    assert io.read_homography(write(tmp_path, "h.txt", "1 0 0 0 1 0 0 0 1")) == Homography.identity()
    assert io.read_homography(write(tmp_path, "h.txt", "2 0 0\n0 2 0\n0 0 2\n")) == Homography.identity()
    with pytest.raises(ParseError):
        io.read_homography(write(tmp_path, "h.txt", "1 0 0 0 1 0 0 0"))
    with pytest.raises(SingularHomography):
        io.read_homography(write(tmp_path, "h.txt", "1 0 0 0 1 0 0 0 0"))


def test_affines(tmp_path):
    aff = io.read_affines(write(tmp_path, "a.txt", "7 1 0 5 0 1 0\n"))
    assert aff[7] == AffineMotion.translation(5.0, 0.0)
    assert aff[8] == AffineMotion.identity()
    assert io.read_affines(write(tmp_path, "a.txt", ""))[1] == AffineMotion.identity()


def test_duplicate_affine_last_wins(tmp_path):
    with pytest.warns(DuplicateFrame):
        aff = io.read_affines(write(tmp_path, "a.txt", "2 1 0 1 0 1 0\n2 1 0 3 0 1 0\n"))
    assert aff[2] == AffineMotion.translation(3.0, 0.0)


def test_affine_error_line(tmp_path):
    with pytest.raises(ParseError) as exc:
        io.read_affines(write(tmp_path, "a.txt", "2 1 0 1 0 1 0\n\n3 1 0 1 0 1\n"))
    assert exc.value.line == 3


def test_result_row_golden(tmp_path):
    p = tmp_path / "r.txt"
    io.write_results([OutputRow(3, 7, BBox.from_ltwh(10.005, -0.001, 30.5, 80.25), 0.91234)], p)
    assert p.read_text() == "3,7,10.01,0.00,30.50,80.25,0.9123,-1,-1,-1\n"


def test_results_sorted_and_empty(tmp_path):
    p = tmp_path / "r.txt"
    rows = [OutputRow(2, 1, BBox(0, 0, 1, 1), 1.0), OutputRow(1, 5, BBox(0, 0, 1, 1), 1.0), OutputRow(1, 2, BBox(0, 0, 1, 1), 1.0)]
    io.write_results(rows, p)
    assert [line.split(",")[:2] for line in p.read_text().splitlines()] == [["1", "2"], ["1", "5"], ["2", "1"]]
    io.write_results([], p)
    assert p.read_text() == ""


@given(
    st.lists(
        st.tuples(
            st.integers(1, 50),
            st.integers(1, 20),
            st.floats(-500, 2000),
            st.floats(-500, 2000),
            st.floats(0, 300),
            st.floats(0, 300),
            st.floats(0, 1),
        ),
        max_size=20,
        unique_by=lambda r: (r[0], r[1]),
    )
)
def test_write_read_round_trip(tmp_path_factory, rows):
    p = tmp_path_factory.mktemp("rt") / "r.txt"
    src = [OutputRow(f, i, BBox.from_ltwh(l, t, w, h), c) for f, i, l, t, w, h, c in rows]
    io.write_results(src, p)
    back = [o for fr in io.read_results(p) for o in fr.outputs]
    src.sort(key=lambda r: (r.frame, r.track_id))
    assert [(o.frame, o.track_id) for o in back] == [(o.frame, o.track_id) for o in src]
    for a, b in zip(src, back):
        # left/top round to 0.005; width/height are derived from rounded corners
        assert np.allclose(a.box.ltwh, b.box.ltwh, atol=0.011)
        assert abs(a.conf - b.conf) <= 5e-5 + 1e-12
    # a second pass is a fixed point
    q = p.with_name("r2.txt")
    io.write_results(io.read_results(p), q)
    assert q.read_text() == p.read_text()


def test_bundle_round_trip(tmp_path):
    from groundtrack import synth

    sc = synth.generate(synth.crossing_scene(seed=2, n_agents=2, n_frames=15))
    io.write_bundle(tmp_path / "b", sc.detections, sc.h0, sc.affines, sc.gt_boxes())
    b = io.read_bundle(tmp_path / "b")
    assert b.h0 == sc.h0
    assert b.affines == sc.affines
    assert sorted(b.detections) == sorted(f for f, d in sc.detections.items() if d)
    gt = io.boxes_by_frame(io.read_results(tmp_path / "b" / io.GT_FILE))
    assert sum(len(v) for v in gt.values()) == sum(len(v) for v in sc.gt.values())


def test_no_warnings_on_clean_input(tmp_path):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        io.read_detections(write(tmp_path, "d.txt", "1,-1,1,1,1,1,0.5\n"))


def test_frame_results_accepted_by_writer(tmp_path):
    p = tmp_path / "r.txt"
    io.write_results([FrameResult(1, [OutputRow(1, 1, BBox(0, 0, 2, 2), 0.5)])], p)
    assert p.read_text() == "1,1,0.00,0.00,2.00,2.00,0.5000,-1,-1,-1\n"
