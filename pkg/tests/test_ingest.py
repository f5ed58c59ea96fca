import numpy as np
import pytest

from textcontours.ingest import (
    BIG_FIVE_TRAITS,
    MBTI_TRAITS,
    ROOT,
    Document,
    IngestError,
    apply_conllu,
    load_conllu,
    load_dataset,
    segment,
    split_sentences,
    tokenize,
)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestLoaders:
    def test_mbti_decomposition(self, tmp_path):
        path = write(tmp_path / "m.csv", "type,posts\nINTJ,hello world\nESFP,more text\n")
        docs = load_dataset(path, "MBTI", "mbti-csv")
        # first letter of each pair name scores 1: I, N, T, P
        assert docs[0].labels == {"I/E": 1, "N/S": 1, "T/F": 1, "P/J": 0}
        assert docs[1].labels == {"I/E": 0, "N/S": 0, "T/F": 0, "P/J": 1}

    def test_mbti_unknown_letter_named(self, tmp_path):
        path = write(tmp_path / "m.csv", "type,posts\nXNTJ,hello\n")
        with pytest.raises(IngestError, match="'X'"):
            load_dataset(path, "MBTI", "mbti-csv")

    def test_mbti_separator_forces_sentence_boundary(self, tmp_path):
        path = write(tmp_path / "m.csv", "type,posts\nINTJ,first post|||second post\n")
        docs = load_dataset(path, "MBTI", "mbti-csv")
        sents = segment(docs[0])
        assert [s.surfaces() for s in sents] == [["first", "post"], ["second", "post"]]

    def test_essays_flags(self, tmp_path):
        path = write(
            tmp_path / "e.csv",
            "#AUTHID,TEXT,cEXT,cNEU,cAGR,cCON,cOPN\n"
            "id1,Some essay text.,y,n,n,n,n\n",
        )
        docs = load_dataset(path, "BigFive", "essays-csv")
        assert docs[0].labels == {"E": 1, "O": 0, "C": 0, "A": 0, "N": 0}

    def test_label_completeness(self, tmp_path):
        path = write(
            tmp_path / "e.csv",
            "#AUTHID,TEXT,cEXT,cNEU,cAGR,cCON,cOPN\n"
            "a,text one.,y,n,y,n,y\nb,text two.,n,y,n,y,n\n",
        )
        for doc in load_dataset(path, "BigFive", "essays-csv"):
            assert set(doc.labels) == set(BIG_FIVE_TRAITS)
            assert all(v in (0, 1) for v in doc.labels.values())

    def test_malformed_row_reports_number(self, tmp_path):
        path = write(
            tmp_path / "e.csv",
            "#AUTHID,TEXT,cEXT,cNEU,cAGR,cCON,cOPN\n"
            "a,fine.,y,n,y,n,y\nb,broken.,maybe,y,n,y,n\n",
        )
        with pytest.raises(IngestError, match="row 3"):
            load_dataset(path, "BigFive", "essays-csv")

    def test_duplicate_id_rejected(self, tmp_path):
        path = write(
            tmp_path / "e.csv",
            "#AUTHID,TEXT,cEXT,cNEU,cAGR,cCON,cOPN\n"
            "a,one.,y,n,y,n,y\na,two.,n,y,n,y,n\n",
        )
        with pytest.raises(IngestError, match="duplicate"):
            load_dataset(path, "BigFive", "essays-csv")

    def test_schema_format_mismatch(self, tmp_path):
        path = write(tmp_path / "m.csv", "type,posts\nINTJ,x\n")
        with pytest.raises(IngestError):
            load_dataset(path, "BigFive", "mbti-csv")


class TestSegment:
    def test_two_plain_sentences(self):
        sents = segment(Document(id="a", text="I am happy. I am tired."))
        assert len(sents) == 2
        assert all(len(s.tokens) == 4 for s in sents)  # 3 words + period

    def test_abbreviation_does_not_split(self):
        sents = segment(Document(id="a", text="Dr. Smith left."))
        assert len(sents) == 1

    def test_whitespace_only_is_error(self):
        with pytest.raises(IngestError, match="empty document"):
            segment(Document(id="a", text="   \n\t "))

    def test_sentence_indices_contiguous(self):
        sents = segment(Document(id="a", text="One here. Two here! Three here?"))
        assert [s.index for s in sents] == list(range(len(sents)))

    def test_round_trip_covers_all_non_whitespace(self):
        text = 'He said "stop"! Then (quietly) we left. Really?\nNew line here.'
        doc = Document(id="a", text=text)
        joined = "".join("".join(s.surfaces()) for s in segment(doc))
        assert joined == "".join(text.split())

    def test_determinism(self):
        doc = Document(id="a", text="Some text. More text! And more?")
        assert segment(doc) == segment(doc)

    def test_tokenizer_peels_punctuation(self):
        assert tokenize("(hello!)") == ["(", "hello", "!", ")"]
        assert tokenize("well-known don't") == ["well-known", "don't"]

    def test_split_respects_initials(self):
        assert split_sentences("Then A. B. came. Done!") == ["Then A. B. came.", "Done!"]


CONLLU = """# newdoc id = doc-1
# sent_id = 1
1\tShe\tshe\tPRON\tPRP\tCase=Nom\t2\tnsubj\t_\t_
2\truns\trun\tVERB\tVBZ\tTense=Pres\t0\troot\t_\t_
3\t.\t.\tPUNCT\t.\t_\t2\tpunct\t_\t_

# sent_id = 2
1\tHe\the\tPRON\tPRP\t_\t2\tnsubj\t_\t_
2\tsleeps\tsleep\tVERB\tVBZ\t_\t0\troot\t_\t_

"""


class TestConllu:
    def test_round_trip(self, tmp_path):
        path = write(tmp_path / "a.conllu", CONLLU)
        result = load_conllu(path)
        assert list(result) == ["doc-1"]
        sents = result["doc-1"]
        assert len(sents) == 2
        first = sents[0]
        assert first.tokens[0].head == 1  # nsubj points at "runs"
        assert first.tokens[1].head == ROOT
        assert first.tokens[0].pos == "PRON"
        assert first.tokens[0].morph == "Case=Nom"
        assert first.tokens[2].deprel == "punct"

    def test_malformed_line_reports_number(self, tmp_path):
        bad = CONLLU.replace("2\truns\trun\tVERB\tVBZ\tTense=Pres\t0\troot\t_\t_",
                             "2\truns\trun\tVERB")
        path = write(tmp_path / "a.conllu", bad)
        with pytest.raises(IngestError, match="line 4"):
            load_conllu(path)

    def test_non_contiguous_ids_rejected(self, tmp_path):
        bad = CONLLU.replace("3\t.\t.\tPUNCT\t.\t_\t2\tpunct\t_\t_",
                             "4\t.\t.\tPUNCT\t.\t_\t2\tpunct\t_\t_")
        path = write(tmp_path / "a.conllu", bad)
        with pytest.raises(IngestError, match="contiguous"):
            load_conllu(path)

    def test_head_outside_sentence_rejected(self, tmp_path):
        bad = CONLLU.replace("1\tHe\the\tPRON\tPRP\t_\t2\tnsubj\t_\t_",
                             "1\tHe\the\tPRON\tPRP\t_\t9\tnsubj\t_\t_")
        path = write(tmp_path / "a.conllu", bad)
        with pytest.raises(IngestError, match="head"):
            load_conllu(path)

    def test_apply_warns_on_unknown_id_and_keeps_fallback(self, tmp_path, caplog):
        path = write(tmp_path / "a.conllu", CONLLU)
        annotated = load_conllu(path)
        docs = [Document(id="doc-2", text="Plain text here.")]
        with caplog.at_level("WARNING"):
            result = apply_conllu(docs, annotated)
        assert "doc-1" in caplog.text
        # doc-2 falls back to the built-in splitter
        assert [t.surface for t in result["doc-2"][0].tokens] == ["Plain", "text", "here", "."]


def test_mbti_traits_order():
    assert MBTI_TRAITS == ("I/E", "N/S", "T/F", "P/J")
    assert BIG_FIVE_TRAITS == ("O", "C", "E", "A", "N")
