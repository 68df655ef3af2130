"""Acceptance suite: one test per release criterion.

Each test prints one `[acceptance] criterion N: PASS/FAIL` line (run with
-s to see them live). Tolerances are pinned here and nowhere else.
"""

import random
import re
import time

import numpy as np
import pytest
import torch

from conftest import make_random_lattice
from latticetn.cli import main
from latticetn.config import Config
from latticetn.crf import LinearChainCrf
from latticetn.data import load_corpus, save_corpus, split, synthesize_corpus
from latticetn.errors import CorpusFormatError
from latticetn.labels import LabelSet
from latticetn.lattice import Lexicon, Token, TokenKind, build_lattice
from latticetn.model import LatticeBuilder, TextNormModel
from latticetn.rel_pos import relative_distances, sinusoidal_encode
from latticetn.rules import compile_rules, load_rules
from latticetn.training import evaluate_corpus, train_model
from latticetn.verbalize import TaggedSpan, Verbalizer, asset_path, read_cardinal
from oracles import brute_force_log_partition, brute_force_viterbi, parse_cardinal
from test_encoder import naive_four_term_scores

torch.set_num_threads(1)


def _report(criterion: str, ok: bool, detail: str = ""):
    print(f"\n[acceptance] {criterion}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, f"{criterion}: {detail}"


def default_builder(**kwargs):
    return LatticeBuilder(
        lexicon=Lexicon.from_file(asset_path("lexicon.txt")),
        rules=load_rules(asset_path("default.rules")),
        **kwargs,
    )


def test_criterion_01_relative_distance_oracle():
    started = time.perf_counter()
    lat = build_lattice("学习", [Token("学习", 0, 1, TokenKind.WORD)])
    d = relative_distances(lat)
    exact = (
        d.hh.tolist() == [[0, -1, 0], [1, 0, 1], [0, -1, 0]]
        and d.ht.tolist() == [[0, -1, -1], [1, 0, 0], [0, -1, -1]]
        and d.th.tolist() == [[0, -1, 0], [1, 0, 1], [1, 0, 1]]
        and d.tt.tolist() == [[0, -1, -1], [1, 0, 0], [1, 0, 0]]
    )
    anti = True
    rng = random.Random(101)
    for _ in range(1000):
        m = relative_distances(make_random_lattice(rng))
        anti = anti and (
            bool(torch.all(m.hh.diagonal() == 0))
            and bool(torch.all(m.tt.diagonal() == 0))
            and torch.equal(m.hh, -m.hh.T)
            and torch.equal(m.tt, -m.tt.T)
            and torch.equal(m.ht, -m.th.T)
        )
    elapsed = time.perf_counter() - started
    _report(
        "criterion 1 (relative distances)",
        exact and anti and elapsed < 1.0,
        f"hand-derived matrices exact={exact}, antisymmetry on 1000 lattices={anti}, "
        f"{elapsed:.2f}s",
    )


def test_criterion_02_sinusoidal_identity():
    rng = np.random.default_rng(7)
    distances = torch.tensor(rng.integers(-1000, 1001, size=10000))
    enc = sinusoidal_encode(distances, 64, dtype=torch.float64)
    norms = enc.view(10000, 32, 2).pow(2).sum(dim=-1)
    worst = float((norms - 1.0).abs().max())
    _report(
        "criterion 2 (sinusoidal identity)",
        worst < 1e-9,
        f"max |sin^2+cos^2 - 1| = {worst:.2e} over 10000 distances x 32 pairs",
    )


def test_criterion_03_attention_oracle():
    rng = random.Random(301)
    worst = 0.0
    from latticetn.encoder import RelativeMultiHeadAttention

    for _ in range(100):
        d_model = rng.choice([4, 8, 16])
        n_heads = rng.choice([1, 2])
        length = rng.randint(1, 10)
        scaled = rng.random() < 0.5
        torch.manual_seed(rng.randint(0, 2**31))
        attn = RelativeMultiHeadAttention(d_model, n_heads, scaled=scaled).double()
        with torch.no_grad():
            for p in attn.parameters():
                p.normal_(0, 0.7)
        emb = torch.randn(length, d_model, dtype=torch.float64)
        rel = torch.randn(length, length, d_model, dtype=torch.float64)
        with torch.no_grad():
            got = attn.attention_scores(emb, rel)
            want = naive_four_term_scores(attn, emb, rel)
        worst = max(worst, float((got - want).abs().max()))
    _report(
        "criterion 3 (attention oracle)",
        worst < 1e-9,
        f"max |production - naive four-term| = {worst:.2e} over 100 instances",
    )


def test_criterion_04_gradient_check():
    started = time.perf_counter()
    config = Config(d_model=8, n_heads=2, d_ff=16, seed=11, dropout=0.0)
    label_set = LabelSet.for_categories(["O", "DIGIT", "PUNC", "CARDINAL"])
    sentence, gold = "学习2", ["O", "O", "S-DIGIT"]
    builder = LatticeBuilder(
        lexicon=Lexicon(["学习"]), rules=compile_rules("NUM\t[0-9]+")
    )
    lattice = builder.build(sentence)
    assert len(lattice) == 5  # 3 characters + word span + NSW span
    model = TextNormModel(config, sentence, label_set).double()
    gen = torch.Generator().manual_seed(123)
    with torch.no_grad():
        for p in model.parameters():
            p.copy_(0.5 * torch.randn(p.shape, generator=gen, dtype=torch.float64))
    model.train()
    model.loss(lattice, gold).backward()

    eps = 1e-4
    worst_name, worst_rel = "", 0.0
    for name, p in model.named_parameters():
        numeric = torch.zeros_like(p)
        flat, nflat = p.data.view(-1), numeric.view(-1)
        for i in range(flat.numel()):
            orig = float(flat[i])
            flat[i] = orig + eps
            with torch.no_grad():
                up = float(model.loss(lattice, gold))
            flat[i] = orig - eps
            with torch.no_grad():
                down = float(model.loss(lattice, gold))
            flat[i] = orig
            nflat[i] = (up - down) / (2 * eps)
        rel = float((p.grad - numeric).norm()) / max(float(numeric.norm()), 1e-10)
        if rel > worst_rel:
            worst_name, worst_rel = name, rel
    elapsed = time.perf_counter() - started
    _report(
        "criterion 4 (gradient check)",
        worst_rel < 1e-4 and elapsed < 30.0,
        f"worst tensor {worst_name} rel err {worst_rel:.2e}, {elapsed:.1f}s",
    )


def test_criterion_05_crf_oracles():
    rng = random.Random(501)
    worst_logz = 0.0
    viterbi_ok = True
    for _ in range(200):
        k = rng.randint(1, 5)
        length = rng.randint(1, 6)
        crf = LinearChainCrf(k).double()
        gen = torch.Generator().manual_seed(rng.randint(0, 2**31))
        with torch.no_grad():
            crf.transitions.copy_(torch.randn(k, k, generator=gen, dtype=torch.float64))
            crf.start_transitions.copy_(torch.randn(k, generator=gen, dtype=torch.float64))
            crf.end_transitions.copy_(torch.randn(k, generator=gen, dtype=torch.float64))
        emissions = torch.randn(length, k, generator=gen, dtype=torch.float64)
        e = emissions.numpy()
        t = crf.transitions.detach().numpy()
        s = crf.start_transitions.detach().numpy()
        en = crf.end_transitions.detach().numpy()
        want_seq, _ = brute_force_viterbi(e, t, s, en)
        viterbi_ok = viterbi_ok and crf.decode(emissions) == list(want_seq)
        with torch.no_grad():
            got_logz = float(crf.log_partition(emissions))
        worst_logz = max(worst_logz, abs(got_logz - brute_force_log_partition(e, t, s, en)))
    _report(
        "criterion 5 (CRF oracles)",
        viterbi_ok and worst_logz < 1e-6,
        f"viterbi equals enumeration on 200 instances={viterbi_ok}, "
        f"max |logZ err| = {worst_logz:.2e}",
    )


def test_criterion_06_overfit_one_example():
    config = Config(n_layers=1, seed=7, learning_rate=1e-2)
    sentence = "今天气温-20℃。"
    gold = [
        "O", "O", "O", "O",
        "S-HYPHEN_SUBZERO", "B-CARDINAL", "E-CARDINAL", "S-MEASURE_UNIT", "S-PUNC",
    ]
    builder = LatticeBuilder(
        lexicon=Lexicon(["今天", "气温"]), rules=compile_rules("SIGNED\t-[0-9]+")
    )
    lattice = builder.build(sentence)
    model = TextNormModel(config, sentence)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    below_at = None
    for step in range(1, 201):
        optimizer.zero_grad()
        loss = model.loss(lattice, gold)
        loss.backward()
        optimizer.step()
        if float(loss.detach()) < 0.01:
            below_at = step
            break
    _report(
        "criterion 6 (overfit one example)",
        below_at is not None,
        f"CRF NLL below 0.01 at step {below_at}",
    )


def test_criterion_07_desk_scale_end_to_end(capsys):
    started = time.perf_counter()
    config = Config(seed=7, epochs=5)
    corpus = synthesize_corpus(2000, seed=7)
    train_c, dev_c, test_c = split(corpus, seed=7)
    builder = default_builder()
    model = TextNormModel(config, train_c.characters())
    train_model(model, builder, train_c, dev_c, config)
    report = evaluate_corpus(model, builder, test_c)
    train_elapsed = time.perf_counter() - started
    accuracy_ok = report.token_accuracy >= 0.95 and train_elapsed < 600.0

    # ablation trend through the CLI command, medians over three seeds
    code = main(
        [
            "ablate", "--synthetic", "800", "--epochs", "4",
            "--seed", "7", "--seeds", "7,8,9", "--d-model", "64",
        ]
    )
    out = capsys.readouterr().out
    medians = {}
    for line in out.splitlines():
        m = re.match(r"(full|-lexicon|-rules|-both)\s+([0-9.]+)\s+([0-9.]+)$", line)
        if m:
            medians[m.group(1)] = float(m.group(2))
    trend_ok = (
        code == 0
        and len(medians) == 4
        and medians["full"] >= medians["-lexicon"]
        and medians["full"] >= medians["-rules"]
        and medians["full"] >= medians["-both"]
    )
    _report(
        "criterion 7 (desk-scale end to end)",
        accuracy_ok and trend_ok,
        f"test token accuracy {report.token_accuracy:.4f} in {train_elapsed:.0f}s; "
        f"ablation medians {medians}",
    )


def test_criterion_08_verbalizer_goldens():
    v = Verbalizer.default()

    def reads(text, category):
        return v.verbalize(TaggedSpan(text, 0, len(text) - 1, category))

    goldens = [
        (reads("2021", "DIGIT"), "二零二一"),
        (reads(".", "POINT"), "点"),
        (reads("-", "HYPHEN_RANGE"), "到"),
        (reads("/", "SLASH_PER"), "每"),
        (reads("-", "HYPHEN_RATIO"), "比"),
        (reads("2", "NUM_TWO_LIANG"), "两"),
        (reads("/", "SLASH_OR"), "或"),
        (reads("-", "HYPHEN_MINUS"), "负"),
        (reads("-", "HYPHEN_SUBZERO"), "零下"),
        (reads(":", "COLON_MINUTE"), "分"),
        (reads("-", "HYPHEN_EXTENSION"), "转"),
        (reads("^", "POWER_OPERATOR"), "次方"),
        (reads("/", "SLASH_YEAR"), "年"),
        (reads("/", "SLASH_MONTH"), "月"),
        (reads(":", "COLON_HOUR"), "点"),
        (reads("3/4", "SLASH_FRACTION"), "四分之三"),
        (reads("911", "DIGIT"), "九一一"),
        (reads("11", "CARDINAL"), "十一"),
    ]
    golden_ok = all(got == want for got, want in goldens)
    mismatches = [(got, want) for got, want in goldens if got != want]

    round_trip_ok = all(
        parse_cardinal(read_cardinal(str(n))) == n for n in range(100000)
    )
    _report(
        "criterion 8 (verbalizer goldens)",
        golden_ok and round_trip_ok,
        f"mismatches={mismatches}, cardinal round trip 0..99999 ok={round_trip_ok}",
    )


MALFORMED_FILES = [
    ("你 O\n", 1),  # space instead of tab
    ("你\tO\n好好\tO\n", 2),  # multi-character first column
    ("2\tB-BOGUS\n", 1),  # unknown label
    ("2\tM-DIGIT\n", 1),  # M without B
    ("你\tO\n1\tE-DIGIT\n", 2),  # E without B
    ("2\tB-DIGIT\n1\tE-CARDINAL\n", 2),  # category switch inside span
    ("2\tB-DIGIT\n0\tM-DIGIT\n\n你\tO\n", 2),  # span open at sentence end
    ("2\tB-DIGIT\n你\tO\n", 2),  # B followed by O
    ("2\tB-DIGIT\n1\tB-DIGIT\n", 2),  # B followed by B
    ("。\tS-PUNC\n2\tM-DIGIT\n", 2),  # S followed by M
]


def test_criterion_09_format_fidelity(tmp_path):
    corpus = synthesize_corpus(100, seed=13)
    path = tmp_path / "fixture.tsv"
    save_corpus(path, corpus)
    identity_ok = load_corpus(path).sentences == corpus.sentences

    lines_ok = True
    for i, (content, expected_line) in enumerate(MALFORMED_FILES):
        bad = tmp_path / f"bad{i}.tsv"
        bad.write_text(content, encoding="utf-8")
        with pytest.raises(CorpusFormatError) as err:
            load_corpus(bad)
        lines_ok = lines_ok and err.value.line_no == expected_line
    _report(
        "criterion 9 (format fidelity)",
        identity_ok and lines_ok,
        f"100-sentence identity={identity_ok}, "
        f"10 malformed files rejected at the right lines={lines_ok}",
    )


def test_criterion_10_train_determinism(tmp_path, capsys):
    def run(tag):
        code = main(
            [
                "train", "--synthetic", "200", "--epochs", "2", "--seed", "21",
                "--checkpoint", str(tmp_path / f"{tag}.npz"),
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        return [line for line in out.splitlines() if line.startswith("epoch ")]

    first, second = run("a"), run("b")
    _report(
        "criterion 10 (train determinism)",
        first == second and len(first) == 2,
        f"metric logs identical across runs={first == second}",
    )
