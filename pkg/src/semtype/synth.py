"""Deterministic synthetic tables for demos, fixtures and tests.

Each generator produces values for one semantic type; tables are assembled
from (header, type, generator) triples with a seeded RNG so every corpus is
reproducible from its seed.
"""

from __future__ import annotations

import numpy as np

from .tables import Table, make_column

FIRST_NAMES = [
    "Alice", "Bruno", "Chen", "Dara", "Elena", "Farid", "Grace", "Hiro",
    "Ines", "Jonas", "Kira", "Liam", "Mona", "Nadia", "Omar", "Priya",
    "Quinn", "Rosa", "Sven", "Tara",
]
CITIES = [
    "Amsterdam", "Austin", "Berlin", "Boston", "Chicago", "Denver", "Dublin",
    "Helsinki", "Lisbon", "London", "Madrid", "Oslo", "Paris", "Prague",
    "Seattle", "Tokyo", "Toronto", "Utrecht", "Vienna", "Zurich",
]
COUNTRIES = [
    "United States", "Canada", "Germany", "France", "Netherlands", "Japan",
    "Brazil", "Australia", "Spain", "Sweden", "Italy", "Norway",
]
COMPANY_WORDS = ["Acme", "Globex", "Initech", "Umbra", "Vertex", "Nimbus", "Quantify"]
NOISE_WORDS = [
    "crimson", "velvet", "orbit", "lantern", "quartz", "meadow", "harbor",
    "ember", "willow", "cinder", "prism", "tundra",
]


def gen_name(rng: np.random.Generator) -> str:
    return FIRST_NAMES[int(rng.integers(0, len(FIRST_NAMES)))]


def gen_city(rng: np.random.Generator) -> str:
    return CITIES[int(rng.integers(0, len(CITIES)))]


def gen_country(rng: np.random.Generator) -> str:
    return COUNTRIES[int(rng.integers(0, len(COUNTRIES)))]


def gen_date(rng: np.random.Generator) -> str:
    return f"{int(rng.integers(1995, 2026)):04d}-{int(rng.integers(1, 13)):02d}-{int(rng.integers(1, 29)):02d}"


def gen_email(rng: np.random.Generator) -> str:
    user = gen_name(rng).lower()
    host = COMPANY_WORDS[int(rng.integers(0, len(COMPANY_WORDS)))].lower()
    return f"{user}{int(rng.integers(1, 99))}@{host}.com"


def gen_url(rng: np.random.Generator) -> str:
    host = COMPANY_WORDS[int(rng.integers(0, len(COMPANY_WORDS)))].lower()
    return f"https://www.{host}.com/page/{int(rng.integers(1, 500))}"


def gen_phone(rng: np.random.Generator) -> str:
    return f"{int(rng.integers(200, 1000))}-{int(rng.integers(200, 1000))}-{int(rng.integers(1000, 10000))}"


def gen_zip(rng: np.random.Generator) -> str:
    return f"{int(rng.integers(10000, 99999)):05d}"


def gen_ip(rng: np.random.Generator) -> str:
    return ".".join(str(int(rng.integers(1, 255))) for _ in range(4))


def gen_price(rng: np.random.Generator) -> str:
    return f"${int(rng.integers(1, 900))}.{int(rng.integers(0, 100)):02d}"


def gen_age(rng: np.random.Generator) -> str:
    return str(int(rng.integers(18, 91)))


def gen_year(rng: np.random.Generator) -> str:
    return str(int(rng.integers(1950, 2026)))


def gen_revenue(rng: np.random.Generator) -> str:
    return str(int(rng.integers(5_000_000, 2_000_000_000)))


def gen_salary(rng: np.random.Generator) -> str:
    # decimal cents keep these from colliding with zip/year digit patterns
    return f"{int(rng.integers(32_000, 180_000))}.{int(rng.integers(0, 100)):02d}"


def gen_company(rng: np.random.Generator) -> str:
    word = COMPANY_WORDS[int(rng.integers(0, len(COMPANY_WORDS)))]
    suffix = ["Inc", "LLC", "GmbH", "Ltd"][int(rng.integers(0, 4))]
    return f"{word} {suffix}"


def gen_noise_word(rng: np.random.Generator) -> str:
    return NOISE_WORDS[int(rng.integers(0, len(NOISE_WORDS)))]


def gen_code(rng: np.random.Generator) -> str:
    letters = "ABCDEFGHJKLMNPQRSTUVWXYZ"
    a = letters[int(rng.integers(0, len(letters)))]
    b = letters[int(rng.integers(0, len(letters)))]
    return f"{a}{int(rng.integers(10, 99))}-{int(rng.integers(100, 999))}-{b}{int(rng.integers(0, 9))}"


def gen_coordinates(rng: np.random.Generator) -> str:
    lat = rng.uniform(-90, 90)
    lon = rng.uniform(-180, 180)
    return f"{lat:.4f};{lon:.4f}"


GENERATORS = {
    "name": gen_name,
    "city": gen_city,
    "country": gen_country,
    "date": gen_date,
    "email": gen_email,
    "url": gen_url,
    "phone": gen_phone,
    "zip_code": gen_zip,
    "ip_address": gen_ip,
    "price": gen_price,
    "age": gen_age,
    "year": gen_year,
    "revenue": gen_revenue,
    "salary": gen_salary,
    "company": gen_company,
}


def make_table(
    table_id: str,
    spec: list[tuple[str, str]],
    n_rows: int,
    seed: int,
    *,
    generators=None,
) -> tuple[Table, dict[int, str]]:
    """Build one table from (header, type_id) pairs; returns (table, labels)."""
    generators = generators or GENERATORS
    rng = np.random.Generator(np.random.PCG64(seed))
    columns = []
    labels: dict[int, str] = {}
    for idx, (header, type_id) in enumerate(spec):
        gen = generators[type_id]
        columns.append(make_column(header, [gen(rng) for _ in range(n_rows)]))
        labels[idx] = type_id
    headers = [h for h, _ in spec]
    return Table(table_id=table_id, name=table_id, headers=headers, columns=columns), labels


def table_to_csv(table: Table) -> bytes:
    """Render a table back to simple CSV (values are quote-free by design)."""
    lines = [",".join(table.headers)]
    for i in range(table.n_rows):
        lines.append(",".join(col.values[i] for col in table.columns))
    return ("\n".join(lines) + "\n").encode("utf-8")


GLOBAL_TRAINING_TYPES = [
    "name", "city", "country", "date", "email", "url", "phone",
    "zip_code", "ip_address", "price", "age", "year", "revenue", "company",
]


def demo_global_corpus(seed: int = 100, tables_per_split: int = 8, n_rows: int = 25):
    """Labeled synthetic tables covering the demo ontology's trained types."""
    out = []
    for rep in range(tables_per_split):
        spec = []
        for t in GLOBAL_TRAINING_TYPES:
            header = t if rep % 2 == 0 else f"{t}_{rep}"
            spec.append((header, t))
        out.append(make_table(f"global-{rep}", spec, n_rows, seed + rep))
    return out


def demo_background_tables(seed: int = 900, n_rows: int = 25):
    """Tables whose headers resolve to nothing: background material.

    Includes a plain large-number column so the classifier learns that
    unlabeled desk-scale numerics read as out of distribution.
    """
    rng_specs = [
        [("qqzz_words", "noise"), ("xf_code", "code"), ("metric_xqz", "bignum")],
        [("blorp", "noise"), ("zz_metric", "bignum"), ("qq_code", "code")],
    ]
    generators = dict(GENERATORS)
    generators["noise"] = gen_noise_word
    generators["code"] = gen_code
    generators["bignum"] = gen_salary
    out = []
    for i, spec in enumerate(rng_specs):
        table, _ = make_table(f"background-{i}", spec, n_rows, seed + i, generators=generators)
        out.append(table)
    return out


def train_demo_global(ontology, embeddings, seed: int = 7):
    """Train the demo global classifier on the synthetic corpus."""
    from .classifier import LabeledExample, TrainConfig, make_background_examples, train
    from .features import extract_features
    from .ontology import UNKNOWN_TYPE_ID
    from .tables import profile_column

    examples = []
    tables = []
    for table, labels in demo_global_corpus():
        tables.append(table)
        for idx, type_id in labels.items():
            column = table.columns[idx]
            examples.append(
                LabeledExample(
                    features=extract_features(column, profile_column(column), embeddings),
                    type_id=type_id,
                )
            )
    background_sources = demo_background_tables() + tables
    examples += make_background_examples(background_sources, ontology, 40, 9, embeddings)
    labels = sorted(GLOBAL_TRAINING_TYPES) + [UNKNOWN_TYPE_ID]
    return train(examples, labels, TrainConfig(seed=seed))
