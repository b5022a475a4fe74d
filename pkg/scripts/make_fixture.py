"""Regenerate the synthetic fixture in fixtures/.

The taxonomy is a small illustrative slice of the MeSH C branch; level-3
descriptors and all descriptor UIs are synthetic. The corpus has ~500
records for 1999 split over impactful and non-impactful journals, with a few
deliberately bad lines (malformed JSON, wrong year, unknown headings) to
exercise the ingest counters.

    python scripts/make_fixture.py
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "fixtures"

CATEGORIES = {
    "C01": ("Infections", {
        "C01.150": "Bacterial Infections and Mycoses",
        "C01.610": "Parasitic Diseases",
        "C01.748": "Respiratory Tract Infections",
        "C01.925": "Virus Diseases",
    }),
    "C04": ("Neoplasms", {
        "C04.557": "Neoplasms by Histologic Type",
        "C04.588": "Neoplasms by Site",
        "C04.651": "Neoplasms, Multiple Primary",
        "C04.697": "Neoplastic Processes",
    }),
    "C05": ("Musculoskeletal Diseases", {
        "C05.116": "Bone Diseases",
        "C05.550": "Joint Diseases",
        "C05.651": "Muscular Diseases",
    }),
    "C08": ("Respiratory Tract Diseases", {
        "C08.127": "Bronchial Diseases",
        "C08.381": "Lung Diseases",
    }),
    "C10": ("Nervous System Diseases", {
        "C10.228": "Central Nervous System Diseases",
        "C10.292": "Cranial Nerve Diseases",
        "C10.551": "Nervous System Neoplasms",
        "C10.668": "Neuromuscular Diseases",
    }),
    "C11": ("Eye Diseases", {
        "C11.204": "Conjunctival Diseases",
        "C11.768": "Retinal Diseases",
    }),
    "C12": ("Urogenital Diseases", {
        "C12.050": "Female Urogenital Diseases and Pregnancy Complications",
        "C12.100": "Genital Diseases",
    }),
    "C14": ("Cardiovascular Diseases", {
        "C14.280": "Heart Diseases",
        "C14.907": "Vascular Diseases",
    }),
    "C16": ("Congenital, Hereditary, and Neonatal Diseases and Abnormalities", {
        "C16.131": "Congenital Abnormalities",
        "C16.320": "Genetic Diseases, Inborn",
    }),
    "C23": ("Pathological Conditions, Signs and Symptoms", {
        "C23.550": "Pathologic Processes",
        "C23.888": "Signs and Symptoms",
    }),
    "C26": ("Wounds and Injuries", {
        "C26.200": "Burns",
        "C26.844": "Spinal Injuries",
    }),
}

NON_C = [("Humans", "B01.050.150"), ("Adult", "M01.060.116"), ("Treatment Outcome", "E05.318")]

# categories whose articles in impactful journals stay closer to home
HOME_WEIGHTS = {"C01": 6, "C04": 6, "C10": 5, "C05": 3, "C08": 3, "C11": 2,
                "C12": 2, "C14": 3, "C16": 2, "C23": 3, "C26": 2}
# cross-category affinity: a topic from these pairs is preferred when straying
BRIDGES = {"C04": ["C10", "C23", "C12", "C08"], "C10": ["C04", "C16", "C11"],
           "C01": ["C08", "C23", "C14"], "C16": ["C10", "C05", "C14"],
           "C23": ["C04", "C01", "C14"]}


def taxonomy_rows():
    rows = []
    ui = 0

    def nxt():
        nonlocal ui
        ui += 1
        return f"F{ui:06d}"

    for cat, (name, subs) in CATEGORIES.items():
        rows.append((nxt(), name, [cat]))
        for code, sub_name in subs.items():
            rows.append((nxt(), sub_name, [code]))
            for k in (1, 2):
                rows.append((nxt(), f"{sub_name}, Type {k}", [f"{code}.{100 * k:03d}"]))
    # cross-listed descriptor, as MeSH does for e.g. nervous-system tumours
    rows.append((nxt(), "Neural Tumour, Cross-listed", ["C04.588.614", "C10.551.500"]))
    for name, code in NON_C:
        rows.append((nxt(), name, [code]))
    return rows


def descriptor_pool(rows):
    """second-level code -> descriptor names resolving to it."""
    pool = {}
    for _, name, codes in rows:
        for code in codes:
            if code.startswith("C") and code.count(".") >= 1:
                pool.setdefault(".".join(code.split(".")[:2]), []).append(name)
    return pool


def article(rng, pool, p_cross, n_topics_max):
    cats = list(HOME_WEIGHTS)
    home = rng.choices(cats, weights=[HOME_WEIGHTS[c] for c in cats])[0]
    topics = set()
    for _ in range(rng.randint(1, n_topics_max)):
        cat = home
        if rng.random() < p_cross:
            cat = rng.choice(BRIDGES.get(home, cats))
        topics.add(rng.choice(sorted(CATEGORIES[cat][1])))
    mesh = [rng.choice(pool[t]) for t in sorted(topics)]
    mesh += [name for name, _ in NON_C if rng.random() < 0.5]
    if rng.random() < 0.04:
        mesh.append("Unindexed Heading")
    rng.shuffle(mesh)
    return mesh


def main():
    rng = random.Random(1999)
    OUT.mkdir(exist_ok=True)
    rows = taxonomy_rows()
    with open(OUT / "mesh_c_tree.tsv", "w", encoding="utf-8") as fh:
        fh.write("descriptor_ui\tdescriptor_name\ttree_numbers\n")
        for ui, name, codes in rows:
            fh.write(f"{ui}\t{name}\t{';'.join(codes)}\n")
    pool = descriptor_pool(rows)

    top = [(f"1000-{i:03d}X", f"Fixture Journal of Medicine {i}") for i in range(10)]
    rest = [(f"2000-{i:04d}", f"Fixture Clinical Reports {i}") for i in range(30)]
    with open(OUT / "journals.csv", "w", encoding="utf-8") as fh:
        fh.write("issn,journal_title,year,stratum\n")
        for issn, title in top:
            fh.write(f"{issn},{title},1999,I\n")
        fh.write(f"{top[0][0]},{top[0][1]},2010,I\n")

    lines = []
    pmid = 10_000
    for _ in range(180):
        pmid += 1
        issn, title = rng.choice(top)
        if rng.random() < 0.1:
            issn = None  # matched through the title fallback
        lines.append({"pmid": str(pmid), "year": 1999, "month": rng.randint(1, 12),
                      "journal_issn": issn, "journal_title": title,
                      "mesh": article(rng, pool, 0.15, 4)})
    for _ in range(320):
        pmid += 1
        issn, title = rng.choice(rest)
        month = 6 if rng.random() < 0.4 else rng.randint(1, 12)
        if rng.random() < 0.03:
            month = None
        lines.append({"pmid": str(pmid), "year": 1999, "month": month,
                      "journal_issn": issn, "journal_title": title,
                      "mesh": article(rng, pool, 0.3, 4)})
    for _ in range(3):
        pmid += 1
        lines.append({"pmid": str(pmid), "year": 1998, "month": 6,
                      "journal_issn": rest[0][0], "journal_title": rest[0][1],
                      "mesh": ["Neoplasms by Site"]})
    rng.shuffle(lines)
    text = [json.dumps(obj) for obj in lines]
    text.insert(57, '{"pmid": "bad", "year": ')
    text.insert(311, '{"year": 1999, "mesh": []}')
    (OUT / "corpus_1999.jsonl").write_text("\n".join(text) + "\n", encoding="utf-8")

    (OUT / "example.toml").write_text(
        "# Fixture run: relative paths resolve against this file's directory.\n"
        'corpus = "corpus_1999.jsonl"\n'
        'journals = "journals.csv"\n'
        'taxonomy = "mesh_c_tree.tsv"\n'
        "year = 1999\n"
        "ni_month = 6\n"
        "seed = 42\n"
        "workers = 1\n"
        'core_policy = "intersection"\n'
        "viz_threshold = 0.080\n"
        "bins = 30\n"
        "regression_bins = 20\n"
        "top_k = 3\n"
        "diff_top_k = 5\n",
        encoding="utf-8",
    )


if __name__ == "__main__":
    main()
