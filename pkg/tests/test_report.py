import json

import pytest

from paneval.errors import InvalidInputError
from paneval.report import ReportRow, ScoreReport, load_report, merge_reports


def story_report(label, s, p, g=0.5):
    return ScoreReport(
        metric="story", command="story-score", parameters={"gamma": g},
        rows=[ReportRow(label=label, scores={"similarity": s, "plot": p,
                                             "story": g * s + (1 - g) * p})],
    )


def test_report_shape_and_field_order(tmp_path):
    rep = story_report("model-a", 0.57, 0.67)
    doc = rep.to_dict()
    assert list(doc) == ["tool_version", "metric", "command", "parameters", "rows",
                         "timestamp"]
    assert doc["rows"] == [{"label": "model-a",
                            "scores": {"similarity": 0.57, "plot": 0.67, "story": 0.62}}]
    assert doc["timestamp"].endswith("Z")


def test_json_round_trip_bit_exact(tmp_path):
    # full-precision floats survive serialize -> parse -> serialize
    vals = (0.1 + 0.2, 1 / 3, 5e-324, 0.6749999999999999)
    rep = ScoreReport(metric="fid", command="fid", parameters={"eps": 1e-6},
                      rows=[ReportRow(label=f"r{i}", scores={"fid": v})
                            for i, v in enumerate(vals)])
    path = tmp_path / "rep.json"
    rep.write(path, "json")
    back = load_report(path)
    for row, v in zip(back.rows, vals):
        assert row.scores["fid"] == v  # exact, not approx
    assert back.to_json() == rep.to_json()


def test_markdown_projection_rounds_to_two_decimals():
    rep = story_report("m", 0.5749999, 0.6666)
    md = rep.to_markdown()
    lines = md.strip().splitlines()
    assert lines[0] == "| Model | Similarity Score | Plot Score | Story Score |"
    assert lines[2].startswith("| m | 0.57 | 0.67 |")


def test_markdown_layouts_per_metric():
    ssim_rep = ScoreReport(metric="ssim", command="ssim", parameters={},
                           rows=[ReportRow(label="b", scores={"mean_ssim": 0.125})])
    assert "| Batch | Mean SSIM |" in ssim_rep.to_markdown()
    assert "| b | 0.12 |" in ssim_rep.to_markdown()
    fid_rep = ScoreReport(metric="fid", command="fid", parameters={},
                          rows=[ReportRow(label="f", scores={"fid": 12.345})])
    assert "| Batch | FID |" in fid_rep.to_markdown()
    assert "| f | 12.35 |" in fid_rep.to_markdown()


def test_pairs_detail_survives_round_trip(tmp_path):
    pairs = [{"candidate": "a.png", "target": "b.png", "score": 0.5}]
    rep = ScoreReport(metric="ssim", command="ssim", parameters={},
                      rows=[ReportRow(label="b", scores={"mean_ssim": 0.5},
                                      pairs=pairs)])
    path = tmp_path / "s.json"
    rep.write(path)
    assert load_report(path).rows[0].pairs == pairs


def test_report_validation():
    with pytest.raises(InvalidInputError):
        ScoreReport(metric="bleu", command="x", parameters={}, rows=[
            ReportRow(label="a", scores={"v": 1.0})])
    with pytest.raises(InvalidInputError):
        ScoreReport(metric="fid", command="x", parameters={}, rows=[])
    with pytest.raises(InvalidInputError):
        ReportRow(label="", scores={"v": 1.0})
    with pytest.raises(InvalidInputError):
        ReportRow(label="a", scores={})


def test_render_unknown_format():
    rep = story_report("m", 0.5, 0.5)
    with pytest.raises(InvalidInputError):
        rep.render("yaml")


def test_merge_single_input_is_identity():
    rep = story_report("m", 0.57, 0.67)
    merged = merge_reports([rep])
    assert merged.rows == rep.rows
    assert merged.metric == "story"
    assert merged.command == "report"


def test_merge_sorts_rows_by_label():
    reps = [story_report(lbl, 0.5, 0.5) for lbl in ("zeta", "alpha", "mid")]
    merged = merge_reports(reps)
    assert [r.label for r in merged.rows] == ["alpha", "mid", "zeta"]


def test_merge_preserves_scores_bit_exactly(tmp_path):
    v1, v2 = 0.1 + 0.2, 2 / 3
    reps = []
    for i, v in enumerate((v1, v2)):
        rep = ScoreReport(metric="fid", command="fid", parameters={},
                          rows=[ReportRow(label=f"m{i}", scores={"fid": v})])
        path = tmp_path / f"r{i}.json"
        rep.write(path)
        reps.append(load_report(path))
    merged = merge_reports(reps)
    assert merged.rows[0].scores["fid"] == v1
    assert merged.rows[1].scores["fid"] == v2


def test_merge_rejects_mixed_kinds():
    a = story_report("m", 0.5, 0.5)
    b = ScoreReport(metric="fid", command="fid", parameters={},
                    rows=[ReportRow(label="f", scores={"fid": 1.0})])
    with pytest.raises(InvalidInputError, match="mixed"):
        merge_reports([a, b])
    with pytest.raises(InvalidInputError):
        merge_reports([])


def test_load_report_schema_errors(tmp_path):
    path = tmp_path / "r.json"
    path.write_text("not json{")
    with pytest.raises(InvalidInputError):
        load_report(path)
    path.write_text(json.dumps({"metric": "fid"}))
    with pytest.raises(InvalidInputError, match="missing"):
        load_report(path)
    doc = {"tool_version": "0", "metric": "fid", "command": "fid", "parameters": {},
           "rows": [{"label": "a", "scores": {"fid": "high"}}], "timestamp": "t"}
    path.write_text(json.dumps(doc))
    with pytest.raises(InvalidInputError, match="not a number"):
        load_report(path)
    with pytest.raises(OSError):
        load_report(tmp_path / "absent.json")
