import json

import numpy as np
import pytest

from voxseg import LabelVolume, read_nrrd, write_nrrd
from voxseg.cli import main

from conftest import make_mask


@pytest.fixture
def phantom_files(tmp_path):
    img = tmp_path / "img.nrrd"
    truth = tmp_path / "truth.nrrd"
    seeds = tmp_path / "seeds.nrrd"
    code = main(["phantom", "--size", "24", "--radius", "7", "--out", str(img),
                 "--truth", str(truth), "--seeds", str(seeds), "--fg-radius", "3"])
    assert code == 0
    return img, truth, seeds


def _json_line(capsys):
    out = capsys.readouterr().out.strip().split("\n")[-1]
    return json.loads(out)


def test_phantom_deterministic(tmp_path, capsys):
    a = tmp_path / "a.nrrd"
    b = tmp_path / "b.nrrd"
    for path in (a, b):
        assert main(["phantom", "--size", "16", "--radius", "4", "--noise-sigma", "1.5",
                     "--rng-seed", "3", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_phantom_radius_too_big(tmp_path, capsys):
    assert main(["phantom", "--size", "64", "--radius", "40",
                 "--out", str(tmp_path / "x.nrrd")]) == 2
    assert "radius" in capsys.readouterr().err


def test_segment_phantom(phantom_files, tmp_path, capsys):
    img, truth, seeds = phantom_files
    out = tmp_path / "labels.nrrd"
    code = main(["segment", "--volume", str(img), "--seeds", str(seeds),
                 "--out", str(out), "--threads", "2"])
    assert code == 0
    summary = _json_line(capsys)
    assert summary["converged"] is True
    assert set(summary["elapsed"]) == {"init", "iterate", "total"}
    assert {"lo", "hi"} <= set(summary["roi"])
    labels = read_nrrd(out, as_labels=True)
    assert set(np.unique(labels.labels)) <= {0, 1, 2}


def test_segment_single_label_exits_2(phantom_files, tmp_path, capsys):
    img, _, _ = phantom_files
    only_fg = tmp_path / "fg.nrrd"
    mask = make_mask((24, 24, 24), [(12, 12, 12)])
    write_nrrd(mask, only_fg)
    code = main(["segment", "--volume", str(img), "--seeds", str(only_fg),
                 "--out", str(tmp_path / "o.nrrd")])
    assert code == 2
    assert "seed" in capsys.readouterr().err.lower()


def test_segment_grid_mismatch_exits_2(phantom_files, tmp_path, capsys):
    img, _, _ = phantom_files
    other = tmp_path / "other.nrrd"
    mask = make_mask((10, 10, 10), [(0, 0, 0), (1, 1, 1)])
    mask.labels[1, 1, 1] = 2
    write_nrrd(mask, other)
    assert main(["segment", "--volume", str(img), "--seeds", str(other),
                 "--out", str(tmp_path / "o.nrrd")]) == 2


def test_segment_missing_file_exits_1(tmp_path, capsys):
    assert main(["segment", "--volume", str(tmp_path / "nope.nrrd"),
                 "--seeds", str(tmp_path / "nope2.nrrd"),
                 "--out", str(tmp_path / "o.nrrd")]) == 1


def test_morph_pipeline(tmp_path, capsys):
    mask = make_mask((8, 8, 8), [(3, 3, 3), (6, 6, 6)])
    src = tmp_path / "m.nrrd"
    write_nrrd(mask, src)
    out = tmp_path / "out.nrrd"
    assert main(["morph", "--in", str(src), "--out", str(out),
                 "--ops", "keep-largest"]) == 0
    result = read_nrrd(out, as_labels=True)
    assert int(result.labels.sum()) == 1


def test_morph_figure_pipeline_tokens(tmp_path):
    mask = make_mask((10, 10, 10),
                     [(x, y, z) for x in range(3, 7) for y in range(3, 7) for z in range(3, 7)])
    src = tmp_path / "m.nrrd"
    write_nrrd(mask, src)
    out = tmp_path / "out.nrrd"
    assert main(["morph", "--in", str(src), "--out", str(out),
                 "--ops", "dilate,erode,erode"]) == 0
    assert int(read_nrrd(out, as_labels=True).labels.sum()) > 0


def test_morph_unknown_op_exits_2(tmp_path, capsys):
    mask = make_mask((4, 4, 4), [(1, 1, 1)])
    src = tmp_path / "m.nrrd"
    write_nrrd(mask, src)
    assert main(["morph", "--in", str(src), "--out", str(tmp_path / "o.nrrd"),
                 "--ops", "frobnicate"]) == 2


def test_metrics_identical(tmp_path, capsys):
    mask = make_mask((6, 6, 6), [(2, 2, 2), (3, 2, 2)])
    p = tmp_path / "m.nrrd"
    write_nrrd(mask, p)
    assert main(["metrics", "--a", str(p), "--b", str(p)]) == 0
    obj = _json_line(capsys)
    assert obj["dsc"] == 1.0
    assert obj["hd_mm"]["sym"] == 0.0
    assert obj["ratio"] == 1.0


def test_metrics_shifted_cube(tmp_path, capsys):
    a = make_mask((4, 4, 4), [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)])
    b = make_mask((4, 4, 4), [(x, y, z) for x in (1, 2) for y in (0, 1) for z in (0, 1)])
    pa, pb = tmp_path / "a.nrrd", tmp_path / "b.nrrd"
    write_nrrd(a, pa)
    write_nrrd(b, pb)
    assert main(["metrics", "--a", str(pa), "--b", str(pb)]) == 0
    assert _json_line(capsys)["dsc"] == 0.5


def test_metrics_grid_mismatch_exits_2(tmp_path, capsys):
    a = make_mask((4, 4, 4), [(0, 0, 0)])
    b = make_mask((5, 4, 4), [(0, 0, 0)])
    pa, pb = tmp_path / "a.nrrd", tmp_path / "b.nrrd"
    write_nrrd(a, pa)
    write_nrrd(b, pb)
    assert main(["metrics", "--a", str(pa), "--b", str(pb)]) == 2


def test_volume_command(tmp_path, capsys):
    arr = np.zeros((8, 8, 8), np.uint8)
    arr.ravel()[:10] = 1
    write_nrrd(LabelVolume(labels=arr, spacing=(2, 2, 2)), tmp_path / "m.nrrd")
    assert main(["volume", "--mask", str(tmp_path / "m.nrrd")]) == 0
    obj = _json_line(capsys)
    assert obj["volume_mm3"] == 80.0
    assert obj["voxel_count"] == 10


def test_report_command(tmp_path, capsys):
    rows = ["case_id,manual_path,tool_path,manual_time_s,tool_time_s"]
    for i, (mt, st) in enumerate([(540, 240), (1140, 450)]):
        mask = make_mask((6, 6, 6), [(1 + i, 1, 1), (2 + i, 1, 1)])
        p = tmp_path / f"m{i}.nrrd"
        write_nrrd(mask, p)
        rows.append(f"case{i + 1},{p},{p},{mt},{st}")
    manifest = tmp_path / "pairs.csv"
    manifest.write_text("\n".join(rows) + "\n")
    csv_out = tmp_path / "report.csv"
    json_out = tmp_path / "report.json"
    assert main(["report", "--pairs", str(manifest), "--csv", str(csv_out),
                 "--json", str(json_out)]) == 0
    text = csv_out.read_text()
    assert text.startswith("case_id,mt_min,tool_min,slices,")
    assert "case1,9.00,4.00" in text
    obj = json.loads(json_out.read_text())
    assert len(obj["cases"]) == 2
    assert obj["averages"]["dsc"] == 1.0
