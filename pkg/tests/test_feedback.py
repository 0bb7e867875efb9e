import json

import pytest

from govqa import errors
from govqa.feedback import FeedbackStore, validate_finetune_file, validate_finetune_record


@pytest.fixture
def answers():
    return {
        "resp-1": {"question": "Apa itu APBN?", "answer": "Anggaran negara tahunan."},
        "resp-2": {"question": "What is tax?", "answer": "A compulsory levy."},
    }


@pytest.fixture
def store(tmp_path, answers):
    return FeedbackStore(tmp_path / "feedback.jsonl", response_lookup=answers.get)


class TestRecordFeedback:
    def test_valid_rating_pending(self, store):
        entry = store.record_feedback("resp-1", 5, "bagus")
        assert entry.disposition == "pending"
        assert store.get(entry.id) == entry

    def test_rating_out_of_range(self, store):
        with pytest.raises(errors.InvalidRating):
            store.record_feedback("resp-1", 7)
        with pytest.raises(errors.InvalidRating):
            store.record_feedback("resp-1", 0)

    def test_unknown_response(self, store):
        with pytest.raises(errors.UnknownResponse):
            store.record_feedback("resp-unknown", 4)

    def test_log_is_append_only_and_replayable(self, tmp_path, answers):
        path = tmp_path / "feedback.jsonl"
        store = FeedbackStore(path, response_lookup=answers.get)
        e1 = store.record_feedback("resp-1", 5)
        store.curate(e1.id, "approve_finetune")
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 2  # one feedback event, one curation event
        assert json.loads(lines[0])["type"] == "feedback"
        replayed = FeedbackStore(path, response_lookup=answers.get)
        assert replayed.get(e1.id).disposition == "approve_finetune"


class TestCurate:
    def test_approve_corpus_creates_document(self, store):
        entry = store.record_feedback("resp-1", 3)
        updated, doc = store.curate(entry.id, "approve_corpus",
                                    corrected_answer="Jawaban yang diperbaiki.")
        assert updated.disposition == "approve_corpus"
        assert doc is not None
        assert "Apa itu APBN?" in doc.text
        assert "Jawaban yang diperbaiki." in doc.text

    def test_recurate_rejected_fails(self, store):
        entry = store.record_feedback("resp-1", 2)
        store.curate(entry.id, "rejected")
        with pytest.raises(errors.AlreadyCurated):
            store.curate(entry.id, "approve_corpus")

    def test_finetune_low_rating_needs_correction(self, store):
        entry = store.record_feedback("resp-1", 2)
        with pytest.raises(errors.MissingCorrection):
            store.curate(entry.id, "approve_finetune")

    def test_finetune_high_rating_as_is(self, store):
        entry = store.record_feedback("resp-1", 4)
        updated, doc = store.curate(entry.id, "approve_finetune")
        assert updated.disposition == "approve_finetune"
        assert doc is None

    def test_auto_approve_rule_configurable_off(self, tmp_path, answers):
        store = FeedbackStore(tmp_path / "f.jsonl", response_lookup=answers.get,
                              auto_approve_rating=None)
        entry = store.record_feedback("resp-1", 5)
        with pytest.raises(errors.MissingCorrection):
            store.curate(entry.id, "approve_finetune")


class TestExportFinetune:
    def test_export_counts_and_manifest(self, store, tmp_path):
        for _ in range(3):
            entry = store.record_feedback("resp-1", 5)
            store.curate(entry.id, "approve_finetune")
        out = tmp_path / "ft.jsonl"
        manifest = store.export_finetune(out)
        assert manifest["count"] == 3
        assert len(out.read_text().strip().splitlines()) == 3
        assert (tmp_path / "ft.jsonl.manifest.json").is_file()

    def test_corrected_answer_takes_precedence(self, store, tmp_path):
        entry = store.record_feedback("resp-1", 2)
        store.curate(entry.id, "approve_finetune", corrected_answer="Jawaban dikoreksi.")
        out = tmp_path / "ft.jsonl"
        store.export_finetune(out)
        record = json.loads(out.read_text().strip())
        assert record["messages"][2]["content"] == "Jawaban dikoreksi."

    def test_only_approved_exported(self, store, tmp_path):
        entries = [store.record_feedback("resp-1", 5) for _ in range(5)]
        store.curate(entries[0].id, "approve_finetune")
        store.curate(entries[1].id, "approve_finetune")
        store.curate(entries[2].id, "rejected")
        out = tmp_path / "ft.jsonl"
        manifest = store.export_finetune(out)
        assert manifest["count"] == 2

    def test_empty_selection(self, store, tmp_path):
        with pytest.raises(errors.EmptySelection):
            store.export_finetune(tmp_path / "ft.jsonl")

    def test_every_exported_record_validates(self, store, tmp_path):
        for rid in ("resp-1", "resp-2"):
            entry = store.record_feedback(rid, 5)
            store.curate(entry.id, "approve_finetune")
        out = tmp_path / "ft.jsonl"
        store.export_finetune(out)
        valid, invalid = validate_finetune_file(out)
        assert invalid == 0
        assert valid == 2


class TestValidator:
    def test_valid_record(self):
        assert validate_finetune_record({"messages": [
            {"role": "system", "content": "s"},
            {"role": "user", "content": "u"},
            {"role": "assistant", "content": "a"},
        ]})

    def test_rejects_missing_role(self):
        assert not validate_finetune_record({"messages": [
            {"role": "system", "content": "s"},
            {"role": "assistant", "content": "a"},
        ]})

    def test_rejects_empty_content(self):
        assert not validate_finetune_record({"messages": [
            {"role": "system", "content": "s"},
            {"role": "user", "content": "  "},
            {"role": "assistant", "content": "a"},
        ]})
