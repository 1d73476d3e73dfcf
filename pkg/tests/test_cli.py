import hashlib
import json
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from oracles import recount_prediction_docs
from semtype.classifier import ClassifierParams, TrainConfig, params_to_dict
from semtype.cli import main
from semtype.service import create_app
from semtype.state import canonical_json
from semtype.store import Store, init_global_dir
from semtype.synth import make_table, table_to_csv

GOLDEN_PATH = Path(__file__).parent / "data" / "golden_detect.json"

TINY_ONTOLOGY = b"""version\t1
city\tcity\t-\ttown
date\tdate\t-\tday
price\tprice\t-\tcost
"""
TINY_EMBEDDINGS = b"foo 1 0\nbar 0 1\n"
TINY_RULES = b"re:date\tdate\t^\\d{4}-\\d{2}-\\d{2}$\n"
TOY_CSV = b"date,when,zzz qqq\n2021-01-01,2021-01-01,blorp\n2021-06-05,2021-06-05,zint\n"


def write_tiny_state(root: Path) -> Path:
    """Zero-weight classifier over 3 types; every stage hand-computable."""
    # feature dimension 24 = 22 profile features + 2-dim tiny embeddings
    params = ClassifierParams(
        labels=("city", "date", "price", "unknown"),
        weights=np.zeros((4, 24)),
        bias=np.zeros(4),
        train_config=TrainConfig(),
    )
    data_dir = root / "tiny_state"
    global_dir = data_dir / "global"
    init_global_dir(
        global_dir,
        ontology_bytes=TINY_ONTOLOGY,
        embeddings_bytes=TINY_EMBEDDINGS,
        include_builtin_rules=False,
        params=params,
        config_text="abstain_threshold=0.3\n",
    )
    (global_dir / "rules").mkdir(exist_ok=True)
    (global_dir / "rules" / "tiny.rules.tsv").write_bytes(TINY_RULES)
    return data_dir


def hand_computed_document() -> dict:
    """The expected detect output, written out from stage arithmetic.

    Column 0 freezes at the exact header match. Column 1: date lookup 1.0
    and a uniform classifier -> g(date) = (0 + 1 + 0.25)/3. Column 2 has
    only the uniform classifier -> top 0.25/3 < 0.3 -> abstains.
    """
    uniform = {"city": 0.25, "date": 0.25, "price": 0.25, "unknown": 0.25}
    return {
        "columns": [
            {
                "column_index": 0,
                "header": "date",
                "ranked": [{"type": "date", "confidence": 1.0}],
                "abstained": False,
                "stages": [
                    {"stage": "header", "side": "global", "scores": {"date": 1.0}}
                ],
            },
            {
                "column_index": 1,
                "header": "when",
                "ranked": [
                    {"type": "date", "confidence": (0.0 + 1.0 + 0.25) / 3},
                    {"type": "city", "confidence": 0.25 / 3},
                    {"type": "price", "confidence": 0.25 / 3},
                ],
                "abstained": False,
                "stages": [
                    {"stage": "header", "side": "global", "scores": {}},
                    {"stage": "lookup", "side": "global", "scores": {"date": 1.0}},
                    {"stage": "classifier", "side": "global", "scores": uniform},
                ],
            },
            {
                "column_index": 2,
                "header": "zzz qqq",
                "ranked": [{"type": "unknown", "confidence": 1.0 - 0.25 / 3}],
                "abstained": True,
                "stages": [
                    {"stage": "header", "side": "global", "scores": {}},
                    {"stage": "lookup", "side": "global", "scores": {}},
                    {"stage": "classifier", "side": "global", "scores": uniform},
                ],
            },
        ],
        "ontology_version": 1,
        "model_revision": "g1.e0",
    }


class TestDetect:
    def test_golden_document(self, tmp_path, capsys):
        data_dir = write_tiny_state(tmp_path)
        csv_path = tmp_path / "toy.csv"
        csv_path.write_bytes(TOY_CSV)
        code = main(["detect", str(csv_path), "--state-dir", str(data_dir)])
        assert code == 0
        out = capsys.readouterr().out
        expected = canonical_json(hand_computed_document()).decode() + "\n"
        assert out == expected
        # and matches the frozen golden file byte for byte
        assert out.encode() == GOLDEN_PATH.read_bytes()

    def test_top_k_flag(self, tmp_path, capsys):
        data_dir = write_tiny_state(tmp_path)
        csv_path = tmp_path / "toy.csv"
        csv_path.write_bytes(TOY_CSV)
        assert main(["detect", str(csv_path), "--state-dir", str(data_dir), "--top-k", "1"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert all(len(col["ranked"]) <= 1 for col in doc["columns"])

    def test_missing_file_exit_2(self, tmp_path, capsys):
        data_dir = write_tiny_state(tmp_path)
        assert main(["detect", str(tmp_path / "nope.csv"), "--state-dir", str(data_dir)]) == 2
        assert capsys.readouterr().out == ""  # diagnostics only on stderr

    def test_parse_error_exit_2(self, tmp_path):
        data_dir = write_tiny_state(tmp_path)
        bad = tmp_path / "bad.csv"
        bad.write_bytes(b'a\n"unclosed')
        assert main(["detect", str(bad), "--state-dir", str(data_dir)]) == 2

    def test_bad_state_exit_3(self, tmp_path):
        empty = tmp_path / "no_state"
        empty.mkdir()
        csv_path = tmp_path / "toy.csv"
        csv_path.write_bytes(TOY_CSV)
        assert main(["detect", str(csv_path), "--state-dir", str(empty)]) == 3

    def test_byte_identical_with_service(self, tmp_path, capsys):
        data_dir = write_tiny_state(tmp_path)
        csv_path = tmp_path / "toy.csv"
        csv_path.write_bytes(TOY_CSV)
        main(["detect", str(csv_path), "--state-dir", str(data_dir)])
        cli_bytes = capsys.readouterr().out.encode()

        client = TestClient(create_app(Store(data_dir)))
        table_id = client.post("/v1/tables", content=TOY_CSV).json()["table_id"]
        body = client.get(f"/v1/tables/{table_id}/predictions").json()
        service_bytes = canonical_json(body["prediction"]) + b"\n"
        assert cli_bytes == service_bytes


def write_eval_corpus(root: Path, n_tables: int = 10) -> Path:
    corpus_dir = root / "corpus"
    corpus_dir.mkdir()
    specs = [
        [("City", "city"), ("when", "date")],
        [("email", "email"), ("Age", "age")],
        [("Country", "country"), ("url", "url")],
        [("phone", "phone"), ("year", "year")],
        [("zzq_blob", "name"), ("City", "city")],
    ]
    for i in range(n_tables):
        spec = specs[i % len(specs)]
        table, labels = make_table(f"tab{i:02d}", spec, 20, 4200 + i)
        (corpus_dir / f"tab{i:02d}.csv").write_bytes(table_to_csv(table))
        lines = [f"{idx}\t{type_id}" for idx, type_id in labels.items()]
        (corpus_dir / f"tab{i:02d}.labels.tsv").write_text("\n".join(lines) + "\n")
    return corpus_dir


class TestEval:
    def test_report_matches_recount_oracle(self, demo_state_dir, tmp_path, capsys):
        corpus_dir = write_eval_corpus(tmp_path)
        code = main(["eval", str(corpus_dir), "--state-dir", str(demo_state_dir)])
        assert code == 0
        report = json.loads(capsys.readouterr().out)["report"]

        docs = []
        labels_by_table = []
        for csv_path in sorted(corpus_dir.glob("*.csv")):
            main(["detect", str(csv_path), "--state-dir", str(demo_state_dir)])
            docs.append(json.loads(capsys.readouterr().out))
            labels = {}
            for line in (csv_path.parent / f"{csv_path.stem}.labels.tsv").read_text().splitlines():
                idx, type_id = line.split("\t")
                labels[int(idx)] = type_id
            labels_by_table.append(labels)
        recount = recount_prediction_docs(docs, labels_by_table)
        assert report["n_columns"] == recount["n_columns"]
        assert report["n_predicted"] == recount["n_predicted"]
        assert report["n_correct"] == recount["n_correct"]
        assert report["precision"] == recount["precision"]
        assert report["coverage"] == recount["coverage"]

    def test_tau_one_all_abstain(self, demo_state_dir, tmp_path, capsys):
        # abstention is strict (top < tau), so the corpus must avoid exact
        # header matches whose blended confidence is exactly 1.0
        corpus_dir = tmp_path / "soft_corpus"
        corpus_dir.mkdir()
        for i in range(4):
            table, labels = make_table(
                f"soft{i}", [("when", "date"), ("qq_zz", "name")], 20, 8800 + i
            )
            (corpus_dir / f"soft{i}.csv").write_bytes(table_to_csv(table))
            lines = [f"{idx}\t{type_id}" for idx, type_id in labels.items()]
            (corpus_dir / f"soft{i}.labels.tsv").write_text("\n".join(lines) + "\n")
        main(["eval", str(corpus_dir), "--state-dir", str(demo_state_dir), "--tau", "1.0"])
        report = json.loads(capsys.readouterr().out)["report"]
        assert report["coverage"] == 0.0
        assert report["precision"] is None

    def test_sweep_and_target_precision(self, demo_state_dir, tmp_path, capsys):
        corpus_dir = write_eval_corpus(tmp_path, n_tables=5)
        code = main(
            [
                "eval",
                str(corpus_dir),
                "--state-dir",
                str(demo_state_dir),
                "--sweep-tau",
                "--target-precision",
                "0.9",
            ]
        )
        assert code == 0
        out = json.loads(capsys.readouterr().out)
        assert "calibration" in out and "curve" in out
        assert len(out["curve"]) == 101
        taus = [point["tau"] for point in out["curve"]]
        assert taus == sorted(taus)

    def test_empty_corpus_exit_2(self, demo_state_dir, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert main(["eval", str(empty), "--state-dir", str(demo_state_dir)]) == 2


class TestReplayCommand:
    def test_empty_log_fresh_summary(self, store, capsys):
        code = main(["replay", "--state-dir", str(store.data_dir), "--tenant", "ghost"])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["n_events"] == 0
        assert summary["retrained"] is False

    def test_replay_matches_store_state(self, store, capsys):
        from scenario import correction_event, upload_scenario_corpus

        table_ids, salary_cols = upload_scenario_corpus(store, "acme")
        store.post_feedback("acme", correction_event(table_ids[0], salary_cols[table_ids[0]]))
        live_sha = hashlib.sha256(store.tenant("acme").to_snapshot()).hexdigest()
        code = main(["replay", "--state-dir", str(store.data_dir), "--tenant", "acme"])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["snapshot_sha256"] == live_sha
        assert summary["n_labeling_functions"] >= 2
        assert summary["retrained"] is True

    def test_replay_twice_identical(self, store, capsys):
        from scenario import correction_event, upload_scenario_corpus

        table_ids, salary_cols = upload_scenario_corpus(store, "acme")
        store.post_feedback("acme", correction_event(table_ids[0], salary_cols[table_ids[0]]))
        main(["replay", "--state-dir", str(store.data_dir), "--tenant", "acme"])
        first = capsys.readouterr().out
        main(["replay", "--state-dir", str(store.data_dir), "--tenant", "acme"])
        second = capsys.readouterr().out
        assert first == second

    def test_malformed_log_line_exit_2(self, store, tmp_path):
        bad_log = tmp_path / "bad.jsonl"
        bad_log.write_text('{"event_id": "e1"\n')
        code = main(
            ["replay", str(bad_log), "--state-dir", str(store.data_dir), "--tenant", "acme"]
        )
        assert code == 2


class TestCalibrateCommand:
    def test_outputs_tau_and_curve(self, demo_state_dir, tmp_path, capsys):
        corpus_dir = write_eval_corpus(tmp_path, n_tables=5)
        code = main(
            [
                "calibrate",
                str(corpus_dir),
                "--state-dir",
                str(demo_state_dir),
                "--target-precision",
                "0.95",
            ]
        )
        assert code == 0
        out = json.loads(capsys.readouterr().out)
        assert 0.0 <= out["tau"] <= 1.0
        assert isinstance(out["warning"], bool)
