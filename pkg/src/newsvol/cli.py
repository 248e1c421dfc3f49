"""Command-line front end.

Subcommands run one pipeline stage each and communicate through files in a
work directory::

    ingest     news + prices CSV  -> joined.jsonl, prices.jsonl
    fit        prices.jsonl       -> garch.jsonl
    label      joined.jsonl       -> labeled.jsonl
    featurize  labeled.jsonl      -> vocab.tsv, train.features, test.features
    train      train.features     -> model.jsonl
    eval       model + test.features (and labeled.jsonl with --folds)
                                  -> report.txt, report.jsonl
    sweep-p    joined.jsonl       -> sweep.txt, sweep.jsonl
    chunk      TEXT               -> tagging and chunking trace on stdout
    report     report/sweep files -> tables on stdout

Exit codes: 0 success, 1 domain or contract error, 2 bad input, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import artifacts, evaluation, ingest, textproc
from .errors import ContractError, CoverageError, InvariantViolation, NewsvolError, SchemaError
from .features import format_rows, parse_rows, vectorize_all
from .ingest import PriceBar, record_from_dict, record_to_dict
from .models import check_vocabulary, dumps_model, loads_model, predict
from .pipeline import MODELS, SCHEMES, Corpus, PipelineConfig, featurize, terms, train_model
from .volatility import GarchModel, fit_models, label_binary, label_threshold, price_measure

WORKDIR_ENV = "PRIVYSENSE_WORKDIR"
PATH_FIELDS = ("news", "prices", "workdir", "config")
DEFAULT_FOLDS = 10


@dataclass(frozen=True)
class RunConfig:
    news: str | None = None
    prices: str | None = None
    workdir: str = "work"
    scheme: str = "tfidf"
    model: str = "svm"
    p: int = 0
    p_max: int = 5
    min_thr: float | None = None
    max_thr: float | None = None
    weighting: str = "geometric"
    folds: int | None = None
    seed: int = 42
    split: float = 0.8
    C: float = 1.0
    alpha: float = 1.0
    k1: float = 1.2
    b: float = 0.95
    standard_bm25: bool = False
    log_base: str = "e"
    min_count: int = 4
    lookback: int = ingest.DEFAULT_LOOKBACK
    horizon: int = ingest.DEFAULT_HORIZON
    grid: tuple[str, ...] = ()

    @property
    def hashable(self) -> dict:
        """Settings that shape results; file locations are left out."""
        return {k: v for k, v in asdict(self).items() if k not in PATH_FIELDS}

    @property
    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(
            scheme=self.scheme, model=self.model, C=self.C, alpha=self.alpha, k1=self.k1,
            b=self.b, standard_bm25=self.standard_bm25, log_base=self.log_base,
            min_count=self.min_count, seed=self.seed,
        )

    def path(self, name: str) -> Path:
        return Path(self.workdir) / name


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Merge flag > config file > built-in default (the workdir default
    comes from the environment when set)."""
    values: dict[str, Any] = {}
    env_workdir = os.environ.get(WORKDIR_ENV)
    if env_workdir:
        values["workdir"] = env_workdir
    if getattr(ns, "config", None):
        try:
            loaded = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{ns.config}: not valid JSON ({exc})") from None
        if not isinstance(loaded, dict):
            raise SchemaError(f"{ns.config}: expected a JSON object")
        known = {f.name for f in fields(RunConfig)}
        for key, val in loaded.items():
            key = key.replace("-", "_")
            if key not in known:
                raise SchemaError(f"{ns.config}: unknown setting {key!r}", column=key)
            values[key] = tuple(val) if key == "grid" else val
    for f in fields(RunConfig):
        val = getattr(ns, f.name, None)
        if val is not None:
            values[f.name] = tuple(val) if f.name == "grid" else val
    cfg = RunConfig(**values)
    if cfg.scheme not in SCHEMES or cfg.model not in MODELS:
        raise ContractError(f"scheme must be one of {SCHEMES} and model one of {MODELS}")
    if (cfg.min_thr is None) != (cfg.max_thr is None):
        raise ContractError("--min-thr and --max-thr must be given together")
    if not 0 < cfg.split < 1:
        raise ContractError("--split must lie strictly between 0 and 1")
    return cfg


def _header(kind: str, cfg: RunConfig, **extra) -> dict:
    return artifacts.make_header(kind, cfg.hashable, cfg.seed, **extra)


def _banner(header: dict) -> str:
    return f"# {header['kind']}  seed={header['seed']}  config={header['config_hash']}"


# --- stages ----------------------------------------------------------------


def cmd_ingest(cfg: RunConfig) -> int:
    for flag in ("news", "prices"):
        if getattr(cfg, flag) is None:
            raise ContractError(f"ingest needs --{flag}")
        if not Path(getattr(cfg, flag)).is_file():
            raise SchemaError(f"--{flag}: no such file {getattr(cfg, flag)}")
    docs, skipped = ingest.parse_news_csv(cfg.news)
    unique = ingest.dedupe_news(docs)
    prices, rejected = ingest.parse_prices_csv(cfg.prices)
    records, dropped = ingest.join_news_prices(unique, prices, cfg.lookback, cfg.horizon)
    if len(records) + dropped != len(unique):
        raise InvariantViolation("join lost documents without counting them")
    counts = {
        "news_rows": len(docs) + skipped, "skipped": skipped, "duplicates": len(docs) - len(unique),
        "price_rejected": rejected, "dropped": dropped, "joined": len(records),
    }
    artifacts.write_jsonl(cfg.path("joined.jsonl"), _header("joined", cfg, **counts), map(record_to_dict, records))
    rows = [
        {"ticker": t, "dates": [ingest.format_date(b.date) for b in bars], "closes": [b.close for b in bars]}
        for t, bars in prices.items()
    ]
    artifacts.write_jsonl(cfg.path("prices.jsonl"), _header("prices", cfg, tickers=len(rows)), rows)
    print(" ".join(f"{k}={v}" for k, v in counts.items()))
    return 0


def _load_prices(cfg: RunConfig) -> dict[str, list[PriceBar]]:
    _, rows = artifacts.read_jsonl(cfg.path("prices.jsonl"), "prices")
    return {
        r["ticker"]: [PriceBar(r["ticker"], ingest.parse_date(str(d)), float(c)) for d, c in zip(r["dates"], r["closes"])]
        for r in rows
    }


def cmd_fit(cfg: RunConfig) -> int:
    models, failures = fit_models(_load_prices(cfg))
    rows = [
        {"ticker": t, "omega": m.omega, "alpha": m.alpha, "beta": m.beta,
         "persistence": m.persistence, "loglik": m.loglik, "n": m.n}
        for t, m in sorted(models.items())
    ]
    for r in rows:
        if not r["persistence"] < 1:
            raise InvariantViolation(f"{r['ticker']}: fitted model is not stationary")
    artifacts.write_jsonl(cfg.path("garch.jsonl"), _header("garch", cfg, failures=failures), rows)
    print(f"{'ticker':<8} {'omega':>12} {'alpha':>8} {'beta':>8} {'loglik':>12} {'n':>6}")
    for r in rows:
        print(f"{r['ticker']:<8} {r['omega']:12.6g} {r['alpha']:8.4f} {r['beta']:8.4f} {r['loglik']:12.2f} {r['n']:6d}")
    for t, why in sorted(failures.items()):
        print(f"{t:<8} not fitted: {why}")
    return 0


def _models(cfg: RunConfig) -> dict[str, GarchModel]:
    """GARCH models from garch.jsonl, fitting them first if the file is absent."""
    if not cfg.path("garch.jsonl").exists():
        cmd_fit(cfg)
    _, rows = artifacts.read_jsonl(cfg.path("garch.jsonl"), "garch")
    return {r["ticker"]: GarchModel(r["omega"], r["alpha"], r["beta"], r["loglik"], r["n"]) for r in rows}


def _records(cfg: RunConfig) -> list:
    _, rows = artifacts.read_jsonl(cfg.path("joined.jsonl"), "joined")
    return [record_from_dict(r) for r in rows]


def cmd_label(cfg: RunConfig) -> int:
    records = _records(cfg)
    needs_model = cfg.p >= 1 and cfg.weighting == "geometric"
    models = _models(cfg) if needs_model else {}
    out, short, no_model = [], 0, 0
    for rec in records:
        model = models.get(rec.doc.ticker)
        if needs_model and model is None:
            no_model += 1
            continue
        try:
            m = price_measure(rec, cfg.p, model, cfg.weighting)
        except CoverageError:
            short += 1
            continue
        if cfg.min_thr is None:
            label = label_binary(rec, cfg.p, model, cfg.weighting)
        else:
            label = label_threshold(m, cfg.min_thr, cfg.max_thr)
        row = record_to_dict(rec)
        row.update(label=label.value, measure=m)
        out.append(row)
    counts: dict[str, int] = {}
    for row in out:
        counts[row["label"]] = counts.get(row["label"], 0) + 1
    extra = {"p": cfg.p, "labels": dict(sorted(counts.items())), "skipped_coverage": short, "skipped_no_model": no_model}
    artifacts.write_jsonl(cfg.path("labeled.jsonl"), _header("labeled", cfg, **extra), out)
    print(f"labeled={len(out)} " + " ".join(f"{k}={v}" for k, v in sorted(counts.items()))
          + f" skipped_coverage={short} skipped_no_model={no_model}")
    return 0


def _labeled(cfg: RunConfig) -> tuple[Corpus, list[str]]:
    _, rows = artifacts.read_jsonl(cfg.path("labeled.jsonl"), "labeled")
    if not rows:
        raise ContractError("labeled.jsonl holds no documents")
    corpus = Corpus([record_from_dict(r).doc.text for r in rows])
    return corpus, [r["label"] for r in rows]


def cmd_featurize(cfg: RunConfig) -> int:
    corpus, labels = _labeled(cfg)
    pc = cfg.pipeline
    train, test = evaluation.train_test_split(labels, cfg.split, cfg.seed)
    vocab, X_train = featurize(corpus, train, pc)
    X_test = vectorize_all(terms(corpus, test, train, pc), vocab, pc.weighting)
    params = pc.weighting.as_dict()
    params.update(min_count=pc.min_count, unigram_min_freq=pc.unigram_min_freq)
    common = {"V": len(vocab), "scheme": cfg.scheme, "params": params, "vocab_checksum": vocab.checksum}
    artifacts.write_artifact(cfg.path("vocab.tsv"), _header("vocab", cfg, V=len(vocab)), vocab.dumps().splitlines())
    for name, idx, X in (("train", train, X_train), ("test", test, X_test)):
        header = _header(f"{name}-features", cfg, N=len(idx), docs=idx.tolist(), **common)
        artifacts.write_artifact(cfg.path(f"{name}.features"), header, format_rows(X, [labels[i] for i in idx]))
    print(f"V={len(vocab)} train={len(train)} test={len(test)} scheme={cfg.scheme} checksum={vocab.checksum}")
    return 0


def _features(cfg: RunConfig, name: str):
    header, lines = artifacts.read_artifact(cfg.path(f"{name}.features"), f"{name}-features")
    X, y = parse_rows(lines, header["V"])
    return header, X, y


def cmd_train(cfg: RunConfig) -> int:
    header, X, y = _features(cfg, "train")
    model = train_model(X, y, cfg.pipeline)
    model.vocab_checksum = header["vocab_checksum"]
    extra = {"model": cfg.model, "scheme": header["scheme"], "vocab_checksum": header["vocab_checksum"]}
    artifacts.write_artifact(cfg.path("model.jsonl"), _header("model", cfg, **extra), [dumps_model(model)])
    note = ""
    if cfg.model == "svm":
        note = " converged=" + ",".join(str(t.converged).lower() for t in model.traces)
    print(f"model={cfg.model} classes={','.join(model.classes)} n={len(y)}{note}")
    return 0


def _check_report(rep: evaluation.EvalReport) -> None:
    norm = rep.normalized
    for i, s in enumerate(rep.support):
        target = 1.0 if s > 0 else 0.0
        if abs(norm[i].sum() - target) > 1e-9:
            raise InvariantViolation("normalized confusion row does not sum to 1")
    if rep.n_test and abs(rep.accuracy - np.trace(rep.confusion) / rep.n_test) > 1e-12:
        raise InvariantViolation("accuracy disagrees with the confusion matrix")


def parse_grid(specs: Sequence[str]) -> dict[str, list]:
    """``["C=0.1,1", "alpha=1"]`` -> ``{"C": [0.1, 1.0], "alpha": [1.0]}``."""
    grid: dict[str, list] = {}
    for spec in specs:
        name, sep, vals = spec.partition("=")
        if not sep or name not in ("C", "alpha", "k1", "b", "min_count"):
            raise ContractError(f"bad grid entry {spec!r}; use NAME=v1,v2 with NAME in C, alpha, k1, b, min_count")
        cast = int if name == "min_count" else float
        grid[name] = [cast(v) for v in vals.split(",") if v]
    return grid


def cmd_eval(cfg: RunConfig) -> int:
    sections: dict[str, Any] = {}
    text: list[str] = []
    if cfg.path("model.jsonl").exists():
        mh, mlines = artifacts.read_artifact(cfg.path("model.jsonl"), "model")
        model = loads_model(mlines[0])
        th, X, y = _features(cfg, "test")
        check_vocabulary(model, th["vocab_checksum"])
        classes = sorted(set(model.classes) | set(y))
        rep = evaluation.evaluate(y, predict(model, X), classes)
        _check_report(rep)
        sections["test"] = rep.as_dict()
        text.append(rep.format(f"test split ({mh['model']}, {mh['scheme']})"))
    if cfg.folds or cfg.grid or "test" not in sections:
        k = cfg.folds or DEFAULT_FOLDS
        corpus, labels = _labeled(cfg)
        pc = cfg.pipeline
        if cfg.grid:
            gs = evaluation.grid_search(corpus, labels, pc, parse_grid(cfg.grid), k, cfg.seed)
            sections["grid"] = {"best": gs.best_params, "table": [[p, a] for p, a in gs.table]}
            text.append(f"grid search, {k}-fold CV\n" + gs.format())
            pc = gs.best
        cv = evaluation.cross_validate(corpus, labels, pc, k, cfg.seed)
        for r in cv.reports:
            _check_report(r)
        sections["cv"] = {"k": k, "mean_accuracy": cv.mean_accuracy, "fold_accuracies": cv.fold_accuracies}
        text.append(f"{k}-fold CV ({pc.model}, {pc.scheme}): mean accuracy {100 * cv.mean_accuracy:.1f}%")
    header = _header("report", cfg)
    artifacts.write_jsonl(cfg.path("report.jsonl"), header, [sections])
    artifacts.write_artifact(cfg.path("report.txt"), header, text)
    print(_banner(header))
    print("\n\n".join(text))
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    records = _records(cfg)
    models = _models(cfg) if cfg.weighting == "geometric" else {}
    need = cfg.p_max + 1
    usable = [r for r in records if r.anchor + need < len(r.closes) and (not models or r.doc.ticker in models)]
    if not usable:
        raise CoverageError(f"no joined document has {need} closes after its anchor and a fitted model")
    res = evaluation.sweep_p(usable, models, cfg.pipeline, range(cfg.p_max + 1), cfg.split, cfg.seed, cfg.weighting)
    if len(res.rows) != cfg.p_max + 1:
        raise InvariantViolation("sweep table has the wrong number of rows")
    header = _header("sweep", cfg, documents=len(usable), excluded=len(records) - len(usable))
    payload = {"rows": [list(r) for r in res.rows], "best_p": res.best_p}
    artifacts.write_jsonl(cfg.path("sweep.jsonl"), header, [payload])
    artifacts.write_artifact(cfg.path("sweep.txt"), header, res.format().splitlines())
    print(_banner(header))
    print(res.format())
    return 0


def cmd_chunk(cfg: RunConfig, text: str) -> int:
    print(textproc.describe(text))
    return 0


def cmd_report(cfg: RunConfig) -> int:
    shown = False
    if cfg.path("report.jsonl").exists():
        header, (sections,) = artifacts.read_jsonl(cfg.path("report.jsonl"), "report")
        print(_banner(header))
        if "test" in sections:
            t = sections["test"]
            print(evaluation.EvalReport(t["classes"], np.array(t["confusion"])).format("test split"))
        if "grid" in sections:
            print("grid search best: " + json.dumps(sections["grid"]["best"]))
        if "cv" in sections:
            cv = sections["cv"]
            folds = " ".join(f"{100 * a:.1f}" for a in cv["fold_accuracies"])
            print(f"CV mean accuracy {100 * cv['mean_accuracy']:.1f}%  (folds: {folds})")
        shown = True
    if cfg.path("sweep.txt").exists():
        header, lines = artifacts.read_artifact(cfg.path("sweep.txt"), "sweep")
        print(_banner(header))
        print("\n".join(lines))
        shown = True
    if not shown:
        raise SchemaError(f"no report or sweep artifacts in {cfg.workdir}")
    return 0


# --- argument parsing ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    opts = argparse.ArgumentParser(add_help=False)
    g = opts.add_argument_group("run settings (flag > --config file > default)")
    g.add_argument("--config", help="JSON file of settings, keys as the long flag names")
    g.add_argument("--news", help="news CSV (ticker, exchange, timestamp, story_headline, story_full, story_rank)")
    g.add_argument("--prices", help="prices CSV (tic, datadate, prccd; optional prchd, prcld, prcod)")
    g.add_argument("--workdir", help=f"artifact directory (default: ${WORKDIR_ENV} or ./work)")
    g.add_argument("--scheme", choices=SCHEMES)
    g.add_argument("--model", choices=MODELS)
    g.add_argument("--p", type=int, help="labeling horizon, 0..5 (default 0)")
    g.add_argument("--p-max", type=int, help="largest horizon for sweep-p (default 5)")
    g.add_argument("--min-thr", type=float, help="three-class labeling: upper edge of Negative")
    g.add_argument("--max-thr", type=float, help="three-class labeling: lower edge of Positive")
    g.add_argument("--weighting", choices=("geometric", "uniform"), help="horizon weights for p >= 1")
    g.add_argument("--folds", type=int, help="k for stratified k-fold CV in eval (default 10)")
    g.add_argument("--seed", type=int, help="seed for every random choice (default 42)")
    g.add_argument("--split", type=float, help="training fraction (default 0.8)")
    g.add_argument("--C", "-C", dest="C", type=float, help="SVM regularization (default 1)")
    g.add_argument("--alpha", type=float, help="NB smoothing (default 1)")
    g.add_argument("--k1", type=float, help="BM25 k1 (default 1.2)")
    g.add_argument("--b", type=float, help="BM25 b (default 0.95)")
    g.add_argument("--standard-bm25", action="store_const", const=True, help="add tf to the BM25 denominator")
    g.add_argument("--log-base", choices=("e", "10"))
    g.add_argument("--min-count", type=int, help="drop bag-of-words terms seen fewer times in training (default 4)")
    g.add_argument("--lookback", type=int, help="trading days kept before each news date (default 10)")
    g.add_argument("--horizon", type=int, help="trading days kept after each news date (default 6)")
    g.add_argument("--grid", action="append", metavar="NAME=V1,V2", help="grid-search values for eval --folds")

    parser = argparse.ArgumentParser(prog="newsvol", description="Price-labeled news sentiment pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("ingest", "parse, dedupe and join news and price CSVs"),
        ("fit", "fit one GARCH(1,1) per ticker"),
        ("label", "label joined news from price movement"),
        ("featurize", "split labeled news and write feature files"),
        ("train", "train a classifier on the training features"),
        ("eval", "evaluate on the test features and/or by k-fold CV"),
        ("sweep-p", "relabel for p = 0..p-max, retrain and compare"),
        ("report", "print the stored report and sweep tables"),
    ):
        sub.add_parser(name, parents=[opts], help=helptext)
    ch = sub.add_parser("chunk", parents=[opts], help="show POS tags and keyphrase chunks of a text")
    ch.add_argument("text", nargs="+")
    return parser


COMMANDS = {
    "ingest": cmd_ingest, "fit": cmd_fit, "label": cmd_label, "featurize": cmd_featurize,
    "train": cmd_train, "eval": cmd_eval, "sweep-p": cmd_sweep, "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(ns)
        if ns.command == "chunk":
            return cmd_chunk(cfg, " ".join(ns.text))
        return COMMANDS[ns.command](cfg)
    except NewsvolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, UnicodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # anything else is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
