#!/usr/bin/env python3
"""Regenerate the committed fixtures under fixtures/.

The demo embedding file is built from hand-assigned concept axes: tokens in
one concept are parallel (cosine exactly 1), unrelated concepts are
orthogonal, and a few tokens blend two axes. Keeping the construction in a
script makes the numbers auditable.
"""

from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

DIM = 20

AXES = {
    "personal_money": 0,
    "corporate_money": 1,
    "price": 2,
    "city": 3,
    "country": 4,
    "state": 5,
    "date": 6,
    "time": 7,
    "email": 8,
    "url": 9,
    "phone": 10,
    "person": 11,
    "id": 12,
    "age": 13,
    "year": 14,
    "company": 15,
    "network": 16,
    "postal": 17,
    "description": 18,
}

# token -> list of (axis, weight); parallel tokens may differ in scale
TOKENS = {
    "income": [("personal_money", 1.0)],
    "salary": [("personal_money", 2.0)],
    "wage": [("personal_money", 1.0)],
    "wages": [("personal_money", 1.0)],
    "pay": [("personal_money", 1.0)],
    "earnings": [("personal_money", 1.0)],
    "compensation": [("personal_money", 1.0)],
    "stipend": [("personal_money", 1.0)],
    "revenue": [("corporate_money", 1.0)],
    "sales": [("corporate_money", 1.0)],
    "turnover": [("corporate_money", 1.0)],
    "price": [("price", 1.0)],
    "cost": [("price", 1.0)],
    "amount": [("price", 1.0)],
    "fee": [("price", 1.0)],
    "city": [("city", 1.0)],
    "town": [("city", 1.0)],
    "municipality": [("city", 1.0)],
    "country": [("country", 1.0)],
    "nation": [("country", 1.0)],
    "state": [("state", 1.0)],
    "province": [("state", 1.0)],
    "region": [("state", 1.0)],
    "date": [("date", 1.0)],
    "day": [("date", 1.0)],
    "time": [("time", 1.0)],
    "timestamp": [("date", 0.7), ("time", 0.7)],
    "email": [("email", 1.0)],
    "mail": [("email", 1.0)],
    "url": [("url", 1.0)],
    "link": [("url", 1.0)],
    "website": [("url", 1.0)],
    "phone": [("phone", 1.0)],
    "telephone": [("phone", 1.0)],
    "fax": [("phone", 0.9)],
    "name": [("person", 1.0)],
    "firstname": [("person", 1.0)],
    "lastname": [("person", 1.0)],
    "surname": [("person", 1.0)],
    "person": [("person", 1.0)],
    "employee": [("person", 0.8), ("company", 0.4)],
    "id": [("id", 1.0)],
    "identifier": [("id", 1.0)],
    "key": [("id", 1.0)],
    "code": [("id", 1.0)],
    "age": [("age", 1.0)],
    "year": [("year", 1.0)],
    "yr": [("year", 1.0)],
    "company": [("company", 1.0)],
    "employer": [("company", 1.0)],
    "organization": [("company", 1.0)],
    "business": [("company", 1.0)],
    "ip": [("network", 1.0)],
    "address": [("network", 0.5), ("city", 0.5)],
    "zip": [("postal", 1.0)],
    "postal": [("postal", 1.0)],
    "postcode": [("postal", 1.0)],
    "description": [("description", 1.0)],
    "comment": [("description", 1.0)],
    "note": [("description", 1.0)],
    "text": [("description", 1.0)],
    "us": [("country", 0.5), ("state", 0.5)],
}

ONTOLOGY = """# demo global ontology (tab separated)
version\t1
id\tid\t-\tidentifier,key
name\tname\t-\tfull name,person
date\tdate\t-\tday
time\ttime\t-\t-
email\temail\t-\te mail,mail
url\turl\t-\tlink,website
ip_address\tip address\t-\tip
zip_code\tzip code\t-\tzip,postal code
phone\tphone\t-\ttelephone,phone number
price\tprice\t-\tcost,amount
country\tcountry\t-\tnation
us_state\tstate\t-\tprovince
city\tcity\t-\ttown
company\tcompany\t-\temployer,organization
revenue\trevenue\t-\tsales
age\tage\t-\t-
year\tyear\t-\t-
description\tdescription\t-\tcomment,note
"""

EMPLOYEES_CSV = """Name,Income,City,StartDate
Alice,54000,Amsterdam,2019-03-01
Bruno,61500,Berlin,2020-07-15
Chen,58250,Boston,2018-01-20
Dara,49900,Dublin,2021-11-02
Elena,72100,Madrid,2017-05-30
Farid,66400,Oslo,2022-02-14
Grace,51750,Paris,2019-09-09
Hiro,69800,Tokyo,2016-12-01
"""

INVOICES_CSV = """invoice_id,amount,issued,customer_email
INV-1001,"$1,240.50",2023-01-15,alice@acme.com
INV-1002,$980.00,2023-02-03,bruno@globex.com
INV-1003,"$2,310.75",2023-02-19,chen@initech.com
INV-1004,$455.20,2023-03-08,dara@umbra.com
"""


def write_embeddings(path: Path) -> None:
    lines = []
    for token, parts in TOKENS.items():
        vec = [0.0] * DIM
        for axis, weight in parts:
            vec[AXES[axis]] += weight
        rendered = " ".join(f"{x:g}" for x in vec)
        lines.append(f"{token} {rendered}")
    header = f"{len(TOKENS)} {DIM}"
    path.write_text(header + "\n" + "\n".join(lines) + "\n")


def main() -> None:
    (FIXTURES / "global").mkdir(parents=True, exist_ok=True)
    (FIXTURES / "tables").mkdir(parents=True, exist_ok=True)
    (FIXTURES / "global" / "ontology.tsv").write_text(ONTOLOGY)
    write_embeddings(FIXTURES / "global" / "embeddings.txt")
    (FIXTURES / "tables" / "employees.csv").write_text(EMPLOYEES_CSV)
    (FIXTURES / "tables" / "invoices.csv").write_text(INVOICES_CSV)
    print(f"fixtures written under {FIXTURES}")


if __name__ == "__main__":
    main()
