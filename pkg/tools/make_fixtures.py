"""Regenerate the bundled JSON fixtures under src/qbx/data/."""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "qbx" / "data"

ALL = {"name": "All", "attributes": [{"name": "all", "datatype": "string"}]}


def s(name):
    return {"name": name, "datatype": "string"}


def i(name):
    return {"name": name, "datatype": "integer"}


def geo_dimension(with_government=True):
    levels = [
        {"name": "Country", "attributes": [s("countryCode"), s("countryName")]},
        {"name": "Continent", "attributes": [s("continentCode"), s("continentName")]},
    ]
    order = [["Country", "Continent"], ["Continent", "All"]]
    hierarchies = [{"name": "Geography", "levels": ["Country", "Continent", "All"]}]
    if with_government:
        levels.append({"name": "GovernmentType", "attributes": [s("governmentType")]})
        order += [["Country", "GovernmentType"], ["GovernmentType", "All"]]
        hierarchies.append({"name": "Government", "levels": ["Country", "GovernmentType", "All"]})
    return {"name": "Geo", "levels": levels + [ALL], "order": order, "hierarchies": hierarchies}


def running_example_dimensions(with_government=True):
    return [
        {"name": "Sex", "levels": [{"name": "Sex", "attributes": [s("sexCode"), s("sexName")]}, ALL],
         "order": [["Sex", "All"]], "hierarchies": []},
        {"name": "Age", "levels": [{"name": "Age", "attributes": [s("ageGroup")]}, ALL],
         "order": [["Age", "All"]], "hierarchies": []},
        {"name": "Time",
         "levels": [{"name": "Month", "attributes": [i("yearMonthNum"), s("monthName")]},
                    {"name": "Year", "attributes": [i("yearNum")]}, ALL],
         "order": [["Month", "Year"], ["Year", "All"]],
         "hierarchies": [{"name": "Calendar", "levels": ["Month", "Year", "All"]}]},
        {"name": "ApplicationType", "levels": [{"name": "ApplicationType", "attributes": [s("typeName")]}, ALL],
         "order": [["ApplicationType", "All"]], "hierarchies": []},
        geo_dimension(with_government),
    ]


COUNTRIES = {
    # id: (name, continent, government type)
    "AD": ("Andorra", "EU", "Unitary_state"),
    "ZW": ("Zimbabwe", "AF", "Presidential_system"),
    "CM": ("Cameroon", "AF", "Presidential_system"),
    "CD": ("Democratic Republic of the Congo", "AF", "Semi-presidential_system"),
    "BE": ("Belgium", "EU", "Parliamentary_system"),
    "FR": ("France", "EU", "Semi-presidential_system"),
}

ROLES = [
    {"role": "Sex", "dimension": "Sex"},
    {"role": "Age", "dimension": "Age"},
    {"role": "Time", "dimension": "Time"},
    {"role": "Application_type", "dimension": "ApplicationType"},
    {"role": "Citizenship", "dimension": "Geo"},
    {"role": "Destination", "dimension": "Geo"},
]

CB1 = [
    ("M", "Y14-17", "201301", "NASY_APP", "CM", "BE", 5),
    ("F", "Y_LT14", "201303", "NASY_APP", "CM", "FR", 5),
    ("M", "Y18-34", "201301", "NASY_APP", "CM", "FR", 10),
    ("F", "Y18-34", "201301", "NASY_APP", "CD", "BE", 25),
    ("F", "Y18-34", "201303", "NASY_APP", "CD", "BE", 30),
]


def running_example():
    geo_members = {
        "Country": {cid: {"countryCode": cid, "countryName": name} for cid, (name, _, _) in COUNTRIES.items()},
        "Continent": {"AF": {"continentCode": "AF", "continentName": "Africa"},
                      "EU": {"continentCode": "EU", "continentName": "Europe"}},
        "GovernmentType": {g: {"governmentType": g.replace("_", " ")}
                           for g in sorted({v[2] for v in COUNTRIES.values()})},
    }
    instances = {
        "Sex": {"members": {"Sex": {"M": {"sexCode": "M", "sexName": "Male"},
                                    "F": {"sexCode": "F", "sexName": "Female"}}}, "rollups": []},
        "Age": {"members": {"Age": {"Y_LT14": {"ageGroup": "less than 14"},
                                    "Y14-17": {"ageGroup": "14 to 17"},
                                    "Y18-34": {"ageGroup": "18 to 34"}}}, "rollups": []},
        "Time": {"members": {"Month": {"201212": {"yearMonthNum": 201212, "monthName": "December 2012"},
                                       "201301": {"yearMonthNum": 201301, "monthName": "January 2013"},
                                       "201303": {"yearMonthNum": 201303, "monthName": "March 2013"}},
                             "Year": {"2012": {"yearNum": 2012}, "2013": {"yearNum": 2013}}},
                 "rollups": [{"child": "Month", "parent": "Year",
                              "pairs": [["201212", "2012"], ["201301", "2013"], ["201303", "2013"]]}]},
        "ApplicationType": {"members": {"ApplicationType": {"NASY_APP": {"typeName": "new applicant"},
                                                            "SUB_APP": {"typeName": "subsequent applicant"}}},
                            "rollups": []},
        "Geo": {"members": geo_members,
                "rollups": [{"child": "Country", "parent": "Continent",
                             "pairs": [[c, v[1]] for c, v in COUNTRIES.items()]},
                            {"child": "Country", "parent": "GovernmentType",
                             "pairs": [[c, v[2]] for c, v in COUNTRIES.items()]}]},
    }
    roles = [r["role"] for r in ROLES]
    cells = [{"members": dict(zip(roles, row[:6])), "measures": {"#applications": row[6]}} for row in CB1]
    return {
        "dimensions": running_example_dimensions(),
        "instances": instances,
        "cubes": [{"name": "Asylum_application", "dimensions": ROLES,
                   "measures": [{"name": "#applications", "aggregate": "SUM", "datatype": "integer"}]}],
        "cuboids": [{"name": "migr_asyappctzm", "cube": "Asylum_application",
                     "levels": {"Sex": "Sex", "Age": "Age", "Time": "Month", "Application_type": "ApplicationType",
                                "Citizenship": "Country", "Destination": "Country"},
                     "cells": cells}],
    }


def lattice216():
    return {
        "dimensions": running_example_dimensions(with_government=False),
        "cubes": [{"name": "Synthetic216", "dimensions": ROLES,
                   "measures": [{"name": "#applications", "aggregate": "SUM", "datatype": "integer"}]}],
    }


def shop():
    dims = [
        {"name": "Product",
         "levels": [{"name": "Product", "attributes": [s("productName"), {"name": "listPrice", "datatype": "decimal"}]},
                    {"name": "Category", "attributes": [s("categoryName")]}, ALL],
         "order": [["Product", "Category"], ["Category", "All"]],
         "hierarchies": [{"name": "Catalog", "levels": ["Product", "Category", "All"]}]},
        {"name": "Store",
         "levels": [{"name": "Store", "attributes": [s("storeName")]},
                    {"name": "City", "attributes": [s("cityName"), i("population")]}, ALL],
         "order": [["Store", "City"], ["City", "All"]],
         "hierarchies": []},
    ]
    products = {"p1": ("Tea", "3.50", "drinks"), "p2": ("Coffee", "4.25", "drinks"),
                "p3": ("Bread", "2.10", "food"), "p4": ("Cheese", "7.80", "food")}
    stores = {"s1": ("Central", "mvd"), "s2": ("Harbour", "mvd"), "s3": ("Old Town", "bue")}
    instances = {
        "Product": {"members": {"Product": {k: {"productName": v[0], "listPrice": float(v[1])}
                                            for k, v in products.items()},
                                "Category": {"drinks": {"categoryName": "Drinks"}, "food": {"categoryName": "Food"}}},
                    "rollups": [{"child": "Product", "parent": "Category",
                                 "pairs": [[k, v[2]] for k, v in products.items()]}]},
        "Store": {"members": {"Store": {k: {"storeName": v[0]} for k, v in stores.items()},
                              "City": {"mvd": {"cityName": "Montevideo", "population": 1300000},
                                       "bue": {"cityName": "Buenos Aires", "population": 3100000}}},
                  "rollups": [{"child": "Store", "parent": "City", "pairs": [[k, v[1]] for k, v in stores.items()]}]},
    }
    rows = [
        ("p1", "s1", 12.5, 3, 3.5, 1), ("p1", "s2", 7.0, 2, 3.5, 4), ("p2", "s1", 8.5, 2, 4.25, 2),
        ("p2", "s3", 17.0, 4, 4.25, 7), ("p3", "s2", 4.2, 2, 2.1, 3), ("p4", "s1", 15.6, 2, 7.8, 5),
        ("p4", "s3", 23.4, 3, 7.8, 6),
    ]
    measures = ["revenue", "units", "avgPrice", "orders"]
    cells = [{"members": {"Product": r[0], "Store": r[1]}, "measures": dict(zip(measures, r[2:]))} for r in rows]
    return {
        "dimensions": dims,
        "instances": instances,
        "cubes": [{"name": "Sales", "dimensions": [{"role": "Product", "dimension": "Product"},
                                                  {"role": "Store", "dimension": "Store"}],
                   "measures": [{"name": "revenue", "aggregate": "SUM", "datatype": "decimal"},
                                {"name": "units", "aggregate": "MIN", "datatype": "integer"},
                                {"name": "avgPrice", "aggregate": "AVG", "datatype": "decimal"},
                                {"name": "orders", "aggregate": "MAX", "datatype": "integer"}]}],
        "cuboids": [{"name": "sales", "cube": "Sales", "levels": {"Product": "Product", "Store": "Store"},
                     "cells": cells}],
    }


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for name, obj in [("running_example", running_example()), ("lattice216", lattice216()), ("shop", shop())]:
        (OUT / f"{name}.json").write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
        print("wrote", name)
