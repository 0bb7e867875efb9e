import json

import pytest

from govqa.embed import DeterministicEmbedder
from govqa.engine import Engine, EngineConfig
from govqa.ingest import Document, document_id
from govqa.llm import ScriptRule, ScriptedProvider


def make_document(text, uri="mem://doc", fmt="txt"):
    return Document(id=document_id(uri, text), source_uri=uri, format=fmt, text=text)


@pytest.fixture
def sample_docs():
    return [
        make_document(
            "APBN adalah Anggaran Pendapatan dan Belanja Negara. "
            "APBN ditetapkan setiap tahun dengan undang-undang. "
            "Defisit anggaran tahun 2023 adalah 2.3 persen dari PDB.",
            uri="mem://apbn",
        ),
        make_document(
            "State revenue comes from tax revenue, non-tax revenue and grants. "
            "Tax revenue is the largest component of state revenue in Indonesia.",
            uri="mem://revenue",
        ),
        make_document(
            "The Ministry of Finance publishes monthly budget realization reports. "
            "These reports cover central government spending and transfers to regions.",
            uri="mem://reports",
        ),
    ]


@pytest.fixture
def catchall_provider():
    return ScriptedProvider(
        [ScriptRule(regex=".", response="Tax revenue is the largest component.")],
        strict=True,
    )


@pytest.fixture
def engine(tmp_path, sample_docs, catchall_provider):
    config = EngineConfig(
        corpus_dir=str(tmp_path / "corpus"),
        feedback_log=str(tmp_path / "feedback.jsonl"),
        answers_log=str(tmp_path / "answers.jsonl"),
        eval_out_dir=str(tmp_path / "eval"),
        chunk_size=120,
        overlap=20,
    )
    eng = Engine(config, embedder=DeterministicEmbedder(dims=64), provider=catchall_provider)
    eng.ingest_documents(sample_docs)
    return eng


def write_script(path, rules):
    path.write_text(json.dumps(rules), encoding="utf-8")
    return str(path)
