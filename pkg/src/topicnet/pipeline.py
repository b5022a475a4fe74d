"""Pipeline stages. Each stage reads its inputs (configured files or earlier
stage outputs in the output directory) and publishes one transactional update
to the report bundle there."""

from __future__ import annotations

import calendar
import json
import logging
from pathlib import Path

import numpy as np

from . import cooccurrence, corpus, diff as diffmod, distfit, export, metrics, rollup as rollupmod
from .config import ConfigError, RunConfig
from .mesh import MeshTaxonomy, TreeCode, load_taxonomy

log = logging.getLogger("topicnet.run")

STAGES = ("ingest", "build", "metrics", "rollup", "diff", "fit")


def event(stage: str, **fields) -> None:
    log.info(json.dumps({"stage": stage, **fields}, sort_keys=True, default=str))


def strata_labels(cfg: RunConfig) -> list[str]:
    return ["I", "NI", "NI-" + calendar.month_name[cfg.ni_month]]


def require(cfg: RunConfig, *keys: str) -> None:
    missing = [k for k in keys if getattr(cfg, k) in (None, [])]
    if missing:
        raise ConfigError("missing required option(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))


def input_hashes(cfg: RunConfig) -> dict:
    paths = list(cfg.corpus) + [cfg.journals, cfg.taxonomy, cfg.network_a, cfg.network_b]
    out = {}
    for p in paths:
        if p and Path(p).is_file():
            out[p] = export.sha256_file(p)
    return out


def _bundle(cfg: RunConfig):
    inputs = cfg.provenance()
    inputs["input_sha256"] = input_hashes(cfg)
    return export.report_bundle(cfg.out_dir, inputs, cfg.seed)


def _taxonomy(cfg: RunConfig) -> MeshTaxonomy | None:
    return load_taxonomy(cfg.taxonomy) if cfg.taxonomy else None


def _category_label(tax: MeshTaxonomy | None, code: str) -> str:
    return tax.label(TreeCode.parse(code)) if tax else code


def _load_strata_networks(cfg: RunConfig) -> list[cooccurrence.TopicNetwork]:
    nets = []
    for label in strata_labels(cfg):
        path = cfg.out_dir / f"network_{label}.edges.csv"
        if path.exists():
            nets.append(export.read_network(path, label=label, year=cfg.year))
    if not nets:
        raise FileNotFoundError(f"no network_*.edges.csv in {cfg.out_dir}; run build first")
    return nets


def _csv(header, rows) -> str:
    return export.csv_text(header, rows)


def ingest(cfg: RunConfig) -> dict:
    require(cfg, "corpus", "journals", "taxonomy", "year")
    tax = load_taxonomy(cfg.taxonomy)
    records, skipped = [], 0
    for path in cfg.corpus:
        recs, sk = corpus.parse_records(path)
        records.extend(recs)
        skipped += sk
    journals = corpus.load_journal_list(cfg.journals, cfg.year)
    if not journals:
        raise ValueError(f"{cfg.journals}: no impactful journals listed for {cfg.year}")
    strata = corpus.stratify(records, corpus.StratumConfig(cfg.year, journals, cfg.ni_month))
    summary = {"year": cfg.year, "records": len(records), "skipped_lines": skipped,
               "strata": strata.counts(), "bags": {}}
    with _bundle(cfg) as bundle:
        for label, recs in strata.items():
            bags, stats = corpus.to_topic_bags(recs, tax)
            corpus.write_bags(bags, bundle.path(f"bags_{label}.jsonl", "topic-bags"))
            summary["bags"][label] = stats.as_dict()
        bundle.write_json("ingest_summary.json", summary, "summary")
    event("ingest", inputs=cfg.corpus, out=str(cfg.out_dir), **summary["strata"], skipped=skipped)
    return summary


def build(cfg: RunConfig) -> list[cooccurrence.TopicNetwork]:
    require(cfg, "taxonomy")
    tax = load_taxonomy(cfg.taxonomy)
    nets = []
    for label in strata_labels(cfg):
        path = cfg.out_dir / f"bags_{label}.jsonl"
        if not path.exists():
            raise FileNotFoundError(f"{path} not found; run ingest first")
        net = cooccurrence.build_network(corpus.read_bags(path), label=label, year=cfg.year)
        net.labels = {n: tax.label(n) for n in net.nodes}
        nets.append(net)
    cores = cooccurrence.extract_core(nets, cfg.core_policy)
    summary = {}
    with _bundle(cfg) as bundle:
        for core in cores:
            label = core.label
            bundle.write_text(f"network_{label}.edges.csv", export.edge_csv(core), "network")
            bundle.write_text(f"network_{label}.nodes.csv", export.node_csv(core), "network")
            bundle.write_text(f"network_{label}.graphml", export.graphml(core), "network")
            bundle.write_text(f"network_{label}.viz.graphml", export.graphml(core, cfg.viz_threshold), "network-viz")
            summary[label] = {
                "papers": core.provenance["papers"],
                "observed_nodes": core.provenance["observed_nodes"],
                "core_nodes": len(core.nodes),
                "links": len(core.edges),
                "viz_links": sum(1 for w in core.edges.values() if w >= cfg.viz_threshold),
            }
        bundle.write_json("build_summary.json", {"core_policy": cfg.core_policy, "networks": summary}, "summary")
    event("build", out=str(cfg.out_dir), **{k: v["core_nodes"] for k, v in summary.items()})
    return cores


def _ranking_rows(ranked, labeler):
    for i, (code, value) in enumerate(ranked, start=1):
        yield i, code, labeler(code), export.fmt2(value)


def _top(values: dict[str, float], k: int):
    return sorted(values.items(), key=lambda cv: (-cv[1], cv[0]))[:k]


def run_metrics(cfg: RunConfig) -> dict:
    nets = _load_strata_networks(cfg)
    out = {}
    with _bundle(cfg) as bundle:
        for net in nets:
            gm, nm, part = metrics.compute_measures(net, cfg.seed, cfg.workers, cfg.betweenness_norm)
            doc = {
                "label": net.label,
                "measures": gm.as_dict(),
                "communities": len(part.communities()),
                "provenance": {
                    "network": net.label, "year": cfg.year, "nodes": len(net.nodes),
                    "links": len(net.edges), "seed": cfg.seed, "workers": cfg.workers,
                    "betweenness_norm": cfg.betweenness_norm,
                },
            }
            bundle.write_json(f"metrics_{net.label}.json", doc, "metrics")
            bundle.write_text(f"nodes_{net.label}.csv", _csv(
                ["code", "label", "strength", "betweenness", "community"],
                ((n, net.label_of(n), export.fmt(nm.strength[n]), export.fmt(nm.betweenness[n]),
                  part.assignment[n]) for n in net.nodes),
            ), "node-measures")
            rows = []
            for measure, values in (("strength", nm.strength), ("betweenness", nm.betweenness)):
                for row in _ranking_rows(_top(values, cfg.top_k), net.label_of):
                    rows.append((measure, *row))
            bundle.write_text(f"ranking_{net.label}.csv",
                              _csv(["measure", "rank", "code", "label", "value"], rows), "ranking")
            out[net.label] = doc
            event("metrics", network=net.label, nodes=len(net.nodes), links=len(net.edges),
                  modularity=gm.modularity)
    return out


def _rollup_rank_rows(roll, k, tax):
    for key in ("total", "intra", "inter"):
        for row in _ranking_rows(rollupmod.rank(roll, key, k), lambda c: _category_label(tax, c)):
            yield (key, *row)


def run_rollup(cfg: RunConfig) -> dict:
    nets = _load_strata_networks(cfg)
    tax = _taxonomy(cfg)
    out = {}
    with _bundle(cfg) as bundle:
        for net in nets:
            roll = rollupmod.rollup(net, inter_mode=cfg.inter_mode)
            bundle.write_text(f"rollup_{net.label}.csv", _csv(
                ["category", "label", "s_total", "s_intra", "s_inter"],
                ((c, _category_label(tax, c), export.fmt(roll[c].total), export.fmt(roll[c].intra),
                  export.fmt(roll[c].inter)) for c in roll),
            ), "rollup")
            bundle.write_text(f"rollup_rank_{net.label}.csv", _csv(
                ["measure", "rank", "category", "label", "value"],
                _rollup_rank_rows(roll, cfg.top_k, tax),
            ), "ranking")
            out[net.label] = roll
            event("rollup", network=net.label, categories=len(roll.categories))
    return out


def run_diff(cfg: RunConfig) -> dict:
    labels = strata_labels(cfg)
    path_a = cfg.network_a or str(cfg.out_dir / f"network_{labels[0]}.edges.csv")
    path_b = cfg.network_b or str(cfg.out_dir / f"network_{labels[2]}.edges.csv")
    a = export.read_network(path_a)
    b = export.read_network(path_b)
    if not cfg.network_a:
        a.provenance["label"] = labels[0]
    if not cfg.network_b:
        b.provenance["label"] = labels[2]
    d = diffmod.diff(a, b)
    tax = _taxonomy(cfg)
    with _bundle(cfg) as bundle:
        bundle.write_text("diff.edges.csv", export.edge_csv(d), "network")
        bundle.write_text("diff.nodes.csv", export.node_csv(d), "network")
        report = None
        try:
            report = diffmod.adjacency_regression(d, cfg.regression_bins)
        except ValueError as exc:
            log.warning("adjacency regression skipped: %s", exc)
        if report is not None:
            bundle.write_json("diff_regression.json", {"sources": d.provenance["sources"], **report.as_dict()}, "regression")
            x, y = diffmod.adjacency_points(d)
            bundle.write_text("diff_points.csv", _csv(
                ["x", "y"], ((export.fmt(xi), export.fmt(yi)) for xi, yi in zip(x.tolist(), y.tolist()))
            ), "regression-points")
        ranking = diffmod.diff_node_ranking(d, cfg.diff_top_k, tax)
        bundle.write_text("diff_node_ranking.csv", _csv(
            ["rank", "code", "label", "strength", "parent", "parent_label"],
            ((i, r.code, r.label, export.fmt2(r.strength), r.parent, r.parent_label)
             for i, r in enumerate(ranking, start=1)),
        ), "ranking")
        roll = rollupmod.rollup(d, inter_mode=cfg.inter_mode)
        bundle.write_text("diff_community_ranking.csv", _csv(
            ["measure", "rank", "category", "label", "value"],
            _rollup_rank_rows(roll, cfg.top_k, tax),
        ), "ranking")
    event("diff", a=path_a, b=path_b, links=len(d.edges),
          slope=report.slope if report else None)
    return {"diff": d, "regression": report, "ranking": ranking}


def run_fit(cfg: RunConfig) -> dict:
    nets = _load_strata_networks(cfg)
    out = {}
    with _bundle(cfg) as bundle:
        for net in nets:
            label = net.label
            weights = np.array(sorted(net.edges.values()))
            strengths = np.array(sorted(metrics.node_strengths(net).values()))
            fits = {}

            hist = distfit.log_binned_histogram(weights, cfg.bins)
            bundle.write_text(f"hist_link_{label}.csv", _hist_csv(hist), "histogram")
            preset = distfit.REFERENCE_POWER_LAW
            if weights[-1] > preset.x_min:
                grid = np.geomspace(preset.x_min, weights[-1], 50)
                bundle.write_text(f"overlay_link_{label}.csv", _xy_csv(*distfit.overlay_curve(preset, grid, hist)), "overlay")
            try:
                fits["power_law"] = distfit.fit_report(distfit.fit_power_law_tail(weights, preset.x_min))
            except ValueError as exc:
                log.warning("%s: power-law fit skipped: %s", label, exc)

            nhist = distfit.linear_histogram(strengths, cfg.bins)
            bundle.write_text(f"hist_node_{label}.csv", _hist_csv(nhist), "histogram")
            epreset = distfit.REFERENCE_EXPONENTIAL
            grid = np.linspace(epreset.lo, epreset.hi, 51)
            bundle.write_text(f"overlay_node_{label}.csv", _xy_csv(*distfit.overlay_curve(epreset, grid, nhist)), "overlay")
            try:
                fits["exponential"] = distfit.fit_report(distfit.fit_exponential(strengths, (epreset.lo, epreset.hi)))
            except ValueError as exc:
                log.warning("%s: exponential fit skipped: %s", label, exc)

            if fits:
                fits["presets"] = {
                    "power_law": distfit.fit_report(preset),
                    "exponential": distfit.fit_report(epreset),
                }
                bundle.write_json(f"fits_{label}.json", fits, "fit")
            out[label] = fits
            event("fit", network=label, fits=sorted(k for k in fits if k != "presets"))
    return out


def _hist_csv(hist: distfit.Histogram) -> str:
    return _csv(["bin_lo", "bin_hi", "density", "count"],
                ((export.fmt(lo), export.fmt(hi), export.fmt(d), c) for lo, hi, d, c in hist.rows()))


def _xy_csv(x, y) -> str:
    return _csv(["x", "y"], ((export.fmt(a), export.fmt(b)) for a, b in zip(x.tolist(), y.tolist())))


STAGE_FUNCS = {
    "ingest": ingest,
    "build": build,
    "metrics": run_metrics,
    "rollup": run_rollup,
    "diff": run_diff,
    "fit": run_fit,
}


def pipeline(cfg: RunConfig) -> None:
    require(cfg, "corpus", "journals", "taxonomy", "year")
    for stage in STAGES:
        STAGE_FUNCS[stage](cfg)
