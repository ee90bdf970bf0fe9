#!/usr/bin/env python3
"""Regenerate the bundled fixture files.

Deterministic: every random choice draws from a seeded generator. Model files
(tagger.json, selector.json, idf.tsv) are produced afterwards by the CLI, see
README.md.
"""

import html
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent
CORPUS = ROOT / "corpus"

STATES = ["california", "texas", "washington", "florida", "oregon", "colorado",
          "arizona", "nevada", "utah", "ohio", "georgia", "virginia", "michigan",
          "illinois", "montana", "idaho", "alaska", "hawaii", "maine", "iowa"]
CITIES = ["seattle", "austin", "portland", "denver", "chicago", "boston",
          "miami", "dallas", "houston", "phoenix", "atlanta", "detroit", "tampa",
          "orlando", "sacramento", "spokane", "tucson", "omaha", "memphis", "boise"]
ACTORS = ["tom cruise", "tom hanks", "brad pitt", "meryl streep", "will smith",
          "matt damon", "julia roberts", "george clooney", "johnny depp",
          "morgan freeman", "harrison ford", "nicole kidman", "sandra bullock",
          "leonardo dicaprio", "ryan gosling", "emma stone", "tom hardy",
          "chris pratt", "anne hathaway", "jennifer lawrence", "al pacino",
          "kate winslet", "russell crowe", "hugh grant", "jim carrey", "ben affleck",
          "angelina jolie", "samuel jackson", "mark wahlberg", "robert de niro"]
HELDOUT_ACTORS = ["keanu reeves", "hugh jackman", "scarlett johansson",
                  "robert redford", "tom cruise", "brad pitt"]
TRAP_ENTITIES = ["joan rivers", "doc rivers", "melissa rivers", "johnny rivers",
                 "rocky mountains", "smoky mountains", "blue mountains",
                 "twin cities", "quad cities"]
TRAP_SUFFIXES = ["net worth", "age", "height", "salary", "wife", "husband",
                 "biography", "news", "tickets", "weather", "map", "photos",
                 "hotels", "quotes", "videos"]
HELDOUT_TRAP_SUFFIXES = ["daughter", "interview", "images", "forecast"]
YEARS = ["2014", "2015", "2016", "2017", "2018"]


# ---------------------------------------------------------------- query log

def positive_queries():
    out = []
    for s in STATES:
        out += [f"cities in {s}", f"largest cities in {s}", f"biggest cities in {s}",
                f"{s} cities", f"coastal cities in {s}", f"small cities in {s}",
                f"rivers in {s}", f"longest rivers in {s}", f"{s} rivers",
                f"major rivers in {s}", f"private schools in {s}",
                f"mountains in {s}", f"tallest mountains in {s}",
                f"highest mountains in {s}", f"{s} mountains",
                f"largest city in {s}", f"longest river in {s}",
                f"tallest mountain in {s}", f"famous rivers in {s}", f"big cities in {s}",
                f"best cities in {s}", f"top cities in {s}", f"high mountains in {s}",
                f"public schools in {s}", f"best schools in {s}"]
    for c in CITIES:
        out += [f"cities near {c}", f"rivers near {c}", f"schools in {c}",
                f"best schools in {c}", f"high schools in {c}", f"{c} schools",
                f"mountains near {c}", f"best school in {c}"]
    for a in ACTORS:
        out += [f"{a} films", f"films with {a}", f"best {a} films",
                f"{a} action films", f"films starring {a}", f"top {a} films",
                f"best {a} film", f"{a} comedy films", f"{a} war films",
                f"recent {a} films"]
    return out


def entity_queries():
    out = []
    for e in TRAP_ENTITIES:
        for s in TRAP_SUFFIXES:
            out.append(f"{e} {s}")
            for y in YEARS[:3]:
                out.append(f"{e} {s} {y}")
    return out


ROOT_NOUNS = ["history", "pollution", "flooding", "education", "violence",
              "safety", "crime", "hiking", "weather", "music", "smoking",
              "fishing", "camping", "bullying", "population", "traffic"]


def root_queries():
    out = []
    types = ["cities", "rivers", "schools", "mountains", "films"]
    for n in ROOT_NOUNS:
        for t in types:
            out.append(f"{n} in {t}")
            out.append(f"{n} of {t}")
            for s in STATES[:6]:
                out.append(f"{n} in {t} of {s}")
            for c in CITIES[:2]:
                out.append(f"{n} in {t} near {c}")
    return out


def write_query_log(rng):
    rows = []
    for q in positive_queries() + entity_queries() + root_queries():
        rows.append((q, rng.randint(150, 5000)))
    # low-traffic noise filtered by min_impressions
    for q in ["cities in atlantis", "rivers on mars", "schools in gotham"]:
        rows.append((q, rng.randint(1, 60)))
    rng.shuffle(rows)
    with open(ROOT / "query_log.tsv", "w") as f:
        f.write("# query<TAB>impressions\n")
        for q, n in rows:
            f.write(f"{q}\t{n}\n")


def write_heldout_movies():
    lines = []
    for a in HELDOUT_ACTORS:
        for tpl in ["{a} movies", "movies with {a}", "best {a} movies",
                    "movies starring {a}", "top {a} movies"]:
            q = tpl.format(a=a)
            lines.append(f"# source={q}")
            for tok in q.split():
                lines.append(f"{tok}\t{'film' if tok == 'movies' else 'O'}")
            lines.append("")
    (ROOT / "movies_heldout.tsv").write_text("\n".join(lines))


def write_traps():
    qs = [f"{e} {s}" for e in TRAP_ENTITIES for s in HELDOUT_TRAP_SUFFIXES]
    (ROOT / "trap_queries.txt").write_text(
        "# entity-name queries absent from query_log.tsv\n" + "\n".join(qs) + "\n")


# --------------------------------------------------------------- embeddings

def write_embeddings(rng):
    dim = 8
    vecs = {}

    def put(word, base, scale=1.0):
        v = [b * scale + rng.gauss(0.0, 0.05) for b in base]
        vecs[word] = v

    def axis(i, w=1.0):
        v = [0.0] * dim
        v[i] = w
        return v

    for i, (pl, sg) in enumerate([("cities", "city"), ("films", "film"),
                                  ("rivers", "river"), ("schools", "school"),
                                  ("mountains", "mountain")]):
        put(pl, axis(i))
        put(sg, axis(i), 0.8)
    put("movies", axis(1), 0.95)
    put("movie", axis(1), 0.75)
    people = set()
    for a in ACTORS + HELDOUT_ACTORS:
        people.update(a.split())
    people.update(["joan", "doc", "melissa", "johnny"])
    for p in sorted(people):
        put(p, axis(5))
    for p in STATES + CITIES:
        put(p, axis(6))
    function_words = ["in", "of", "near", "with", "starring"]
    modifiers = ["largest", "biggest", "coastal", "small", "longest", "major",
                 "private", "tallest", "highest", "best", "high", "action", "top",
                 "famous", "big", "public", "comedy", "war", "recent"]
    suffixes = sorted({w for s in TRAP_SUFFIXES for w in s.split()}) + ROOT_NOUNS
    for w in function_words + modifiers + sorted(set(suffixes)):
        base = [rng.uniform(-0.3, 0.3) for _ in range(dim)]
        base[7] = 1.0 if w in function_words else 0.5
        put(w, base)
    for y in YEARS:
        put(y, [0.0] * 7 + [-0.5])
    with open(ROOT / "embeddings.txt", "w") as f:
        f.write(f"{len(vecs)} {dim}\n")
        for w in sorted(vecs):
            f.write(w + " " + " ".join(f"{x:.4f}" for x in vecs[w]) + "\n")


# ------------------------------------------------------------ tagging gold

# category -> [(query, gold pst or None, gold type or None)]
GOLD = {
    "clean": [
        ("cities in california", "cities", "city"),
        ("coastal cities in california", "cities", "city"),
        ("tom cruise films", "films", "film"),
        ("rivers in texas", "rivers", "river"),
        ("mountains in washington", "mountains", "mountain"),
        ("schools in seattle", "schools", "school"),
        ("airports in florida", "airports", "airport"),
        ("national parks in utah", "parks", "park"),
        ("beaches in hawaii", "beaches", "beach"),
        ("ponds in maine", "ponds", "pond"),
        ("bridges in portland", "bridges", "bridge"),
        ("glaciers in alaska", "glaciers", "glacier"),
        ("hospitals in boston", "hospitals", "hospital"),
        ("stadiums in texas", "stadiums", "stadium"),
        ("golf courses in arizona", "golf courses", "golf_course"),
        ("counties in ohio", "counties", "county"),
        ("brad pitt films", "films", "film"),
        ("deserts in nevada", "deserts", "desert"),
        ("islands in washington", "islands", "island"),
        ("churches in rome", "churches", "church"),
    ],
    "superlative": [
        ("largest city in california", "city", "city"),
        ("longest river in texas", "river", "river"),
        ("tallest mountain in washington", "mountain", "mountain"),
        ("tallest building in seattle", "building", "building"),
        ("best school in austin", "school", "school"),
        ("biggest stadium in texas", "stadium", "stadium"),
        ("oldest church in boston", "church", "church"),
        ("busiest airport in florida", "airport", "airport"),
        ("highest volcano in oregon", "volcano", "volcano"),
    ],
    "entity_trap": [
        ("joan rivers net worth", None, None),
        ("doc rivers salary", None, None),
        ("tyra banks age", None, None),
        ("ernie banks stats", None, None),
        ("jeff bridges movies", None, None),
        ("beau bridges wife", None, None),
        ("rosa parks biography", None, None),
        ("parks and recreation cast", None, None),
        ("sacramento kings roster", None, None),
        ("kings of leon tour", None, None),
        ("cayman islands weather", None, None),
        ("twin towers memorial", None, None),
        ("rocky mountains national park", None, None),
    ],
    "root_trap": [
        ("physical education in schools", None, None),
        ("violence in films", None, None),
        ("pollution in rivers", None, None),
        ("crime in cities", None, None),
        ("hiking in mountains", None, None),
        ("history of bridges", None, None),
        ("prayer in schools", None, None),
        ("smoking in films", None, None),
        ("wildlife of islands", None, None),
        ("traffic in cities", None, None),
    ],
    "synonym_miss": [
        ("tom cruise movies", "movies", "film"),
        ("will smith movies", "movies", "film"),
        ("tom hanks movies", "movies", "film"),
        ("brad pitt movies", "movies", "film"),
    ],
    "dp_false_reject": [
        ("list of cities in texas", "cities", "city"),
        ("names of rivers in oregon", "rivers", "river"),
        ("map of airports in florida", "airports", "airport"),
        ("list of islands in greece", "islands", "island"),
    ],
    "false_accept": [
        ("schools closed today", None, None),
        ("rivers flooding now", None, None),
        ("mountains weather forecast", None, None),
        ("bridges collapse video", None, None),
    ],
    "no_hit": [
        ("michael phelps", None, None),
        ("weather tomorrow", None, None),
        ("how to tie a tie", None, None),
        ("john smith", None, None),
        ("pizza near me", None, None),
        ("seattle weather", None, None),
        ("facebook login", None, None),
        ("movie times", None, None),
        ("population of texas", None, None),
        ("capital of france", None, None),
        ("deepest lake in oregon", None, None),
    ],
}

STATE_POOL = ["california", "texas", "washington", "florida", "oregon", "ohio",
              "utah", "nevada", "arizona", "georgia", "virginia", "colorado",
              "maine", "iowa", "idaho", "montana"]


def expand_gold(rng):
    """Grow the hand-written seeds to 200 rows with placeholder substitution."""
    rows = []
    for cat, items in GOLD.items():
        for q, pst, ty in items:
            rows.append((q, pst, ty, cat))
    seen = {r[0] for r in rows}
    fillers = {
        "clean": [("cities in {s}", "cities", "city"), ("rivers in {s}", "rivers", "river"),
                  ("mountains in {s}", "mountains", "mountain"),
                  ("airports in {s}", "airports", "airport"),
                  ("{s} state parks", "parks", "park")],
        "superlative": [("largest city in {s}", "city", "city"),
                        ("longest river in {s}", "river", "river"),
                        ("tallest mountain in {s}", "mountain", "mountain")],
        "entity_trap": [("joan rivers {x}", None, None), ("doc rivers {x}", None, None),
                        ("rosa parks {x}", None, None), ("tyra banks {x}", None, None)],
        "root_trap": [("crime in cities of {s}", None, None),
                      ("pollution in rivers of {s}", None, None),
                      ("education in schools of {s}", None, None)],
        "false_accept": [("crime in {s} cities", None, None),
                         ("pollution in {s} rivers", None, None)],
        "no_hit": [("{s} weather", None, None), ("{s} news", None, None)],
    }
    extras = ["quotes", "height", "husband", "daughter", "interview", "photos",
              "tickets", "death", "awards", "house", "news", "videos"]
    target = {"clean": 64, "superlative": 24, "entity_trap": 30, "root_trap": 30,
              "synonym_miss": 4, "dp_false_reject": 4, "false_accept": 10, "no_hit": 34}
    assert sum(target.values()) == 200
    for cat, want in target.items():
        have = sum(1 for r in rows if r[3] == cat)
        pool = fillers.get(cat, [])
        i = 0
        while have < want:
            tpl, pst, ty = pool[i % len(pool)]
            q = tpl.format(s=rng.choice(STATE_POOL), x=rng.choice(extras))
            i += 1
            if q in seen:
                continue
            seen.add(q)
            rows.append((q, pst, ty, cat))
            have += 1
    return rows


def write_gold(rng):
    rows = expand_gold(rng)
    with open(ROOT / "tagging_gold.tsv", "w") as f:
        f.write("# query<TAB>gold pst (- for null)<TAB>gold type<TAB>category\n")
        for q, pst, ty, cat in rows:
            f.write(f"{q}\t{pst or '-'}\t{ty or '-'}\t{cat}\n")


# ------------------------------------------------------------------ corpus

def table_html(header, rows, caption=None):
    out = ["<table>"]
    if caption:
        out.append(f"<caption>{html.escape(caption)}</caption>")
    out.append("<tr>" + "".join(f"<th>{html.escape(h)}</th>" for h in header) + "</tr>")
    for r in rows:
        out.append("<tr>" + "".join(f"<td>{html.escape(str(c))}</td>" for c in r) + "</tr>")
    out.append("</table>")
    return "\n".join(out)


def page_html(title, h1, sections, nav=True):
    body = [f"<h1>{html.escape(h1)}</h1>"]
    if nav:
        body.append(table_html(["Home", "About"], [["Contact", "Help"]]))
    for h2, para, table in sections:
        body.append(f"<h2>{html.escape(h2)}</h2>")
        body.append(f"<p>{html.escape(para)}</p>")
        body.append(table)
    return ("<!DOCTYPE html>\n<html><head><title>" + html.escape(title) +
            "</title></head>\n<body>\n" + "\n".join(body) + "\n</body></html>\n")


def write_page(doc_id, title, h1, sections, static_rank, url=None):
    CORPUS.mkdir(exist_ok=True)
    (CORPUS / f"{doc_id}.html").write_text(page_html(title, h1, sections))
    meta = {"url": url or f"https://example.org/{doc_id}", "title": title,
            "staticRank": static_rank}
    (CORPUS / f"{doc_id}.meta.json").write_text(json.dumps(meta, indent=2) + "\n")


FILM_ROWS = [
    ["2017", "The Mummy (film)", "Nick Morton"],
    ["2016", "Jack Reacher: Never Go Back", "Jack Reacher"],
    ["2015", "Mission: Impossible Rogue Nation", "Ethan Hunt"],
    ["2014", "Edge of Tomorrow", "William Cage"],
    ["2013", "Oblivion (film)", "Jack Harper"],
    ["2012", "Jack Reacher (film)", "Jack Reacher"],
    ["2012", "Rock of Ages (film)", "Stacee Jaxx"],
    ["2011", "Mission: Impossible Ghost Protocol", "Ethan Hunt"],
    ["2010", "Knight and Day", "Roy Miller"],
    ["2008", "Valkyrie (film)", "Claus von Stauffenberg"],
]
COSTAR_ROWS = [
    ["Nicole Kidman", "Days of Thunder, Far and Away, Eyes Wide Shut", "3"],
    ["Dustin Hoffman", "Rain Man", "1"],
    ["Jack Nicholson", "A Few Good Men", "1"],
    ["Emily Blunt", "Edge of Tomorrow", "1"],
    ["Simon Pegg", "Mission: Impossible III, Ghost Protocol, Rogue Nation", "3"],
    ["Cameron Diaz", "Vanilla Sky, Knight and Day", "2"],
    ["Kelly McGillis", "Top Gun", "1"],
    ["Jamie Foxx", "Collateral", "1"],
]


def write_film_pages():
    film = table_html(["Year", "Movie", "Role"], FILM_ROWS)
    costar = table_html(["Co-star", "Movies", "Times"], COSTAR_ROWS)
    write_page("tom-cruise-movies", "Tom Cruise Movies", "Tom Cruise Movies", [
        ("Filmography", "Tom Cruise has appeared in more than forty pictures since 1981.", film),
        ("Frequent co-stars", "Tom Cruise has shared the screen with many leading actors.", costar),
    ], 0.9, url="https://example.org/tom-cruise-movies")
    awards = table_html(["Award", "Year", "Result"], [
        ["Golden Globe Award, Best Actor (Drama)", "1990", "Won"],
        ["Golden Globe Award, Best Actor (Comedy)", "1997", "Won"],
        ["Academy Award nomination", "1990", "Nominated"], ["Saturn Award", "2015", "Nominated"]])
    write_page("tom-cruise-biography", "Tom Cruise Biography", "Tom Cruise", [
        ("Awards", "Tom Cruise has received three Golden Globe Awards.", awards)], 0.7)
    # standalone single-table page
    single = page_html("Tom Cruise Movies", "Tom Cruise Movies",
                       [("Filmography", "Selected roles.", table_html(["Year", "Movie", "Role"], FILM_ROWS))],
                       nav=False)
    (ROOT / "pages").mkdir(exist_ok=True)
    (ROOT / "pages" / "tom_cruise_movies.html").write_text(single)
    phelps = table_html(["Event", "Time", "Meet"], [
        ["100 m butterfly", "49.82", "2009 World Championships"],
        ["200 m butterfly", "1:51.51", "2009 World Championships"],
        ["400 m individual medley", "4:03.84", "2008 Olympics"],
        ["200 m individual medley", "1:54.23", "2008 Olympic Trials"]])
    write_page("michael-phelps", "Michael Phelps", "Michael Phelps", [
        ("World records", "Michael Phelps set many world records.", phelps)], 0.95)


# Each topic: (query, title, section heading, good table, distractor table, paragraph subject)
def topic_pages(rng):
    topics = []
    city_data = {
        "california": [("Los Angeles", "Los Angeles", "3,898,747"), ("San Diego", "San Diego", "1,386,932"),
                       ("San Jose", "Santa Clara", "1,013,240"), ("San Francisco", "San Francisco", "873,965"),
                       ("Fresno", "Fresno", "542,107"), ("Sacramento", "Sacramento", "524,943")],
        "texas": [("Houston", "Harris", "2,304,580"), ("San Antonio", "Bexar", "1,434,625"),
                  ("Dallas", "Dallas", "1,304,379"), ("Austin", "Travis", "961,855"),
                  ("Fort Worth", "Tarrant", "918,915"), ("El Paso", "El Paso", "678,815")],
        "washington": [("Seattle", "King", "737,015"), ("Spokane", "Spokane", "228,989"),
                       ("Tacoma", "Pierce", "219,346"), ("Vancouver", "Clark", "190,915"),
                       ("Bellevue", "King", "151,854")],
        "florida": [("Jacksonville", "Duval", "949,611"), ("Miami", "Miami-Dade", "442,241"),
                    ("Tampa", "Hillsborough", "384,959"), ("Orlando", "Orange", "307,573"),
                    ("St. Petersburg", "Pinellas", "258,308")],
        "oregon": [("Portland", "Multnomah", "652,503"), ("Eugene", "Lane", "176,654"),
                   ("Salem", "Marion", "175,535"), ("Gresham", "Multnomah", "114,247")],
    }
    governors = [["Gavin Newsom", "Democratic", "2019"], ["Jerry Brown", "Democratic", "2011"],
                 ["Arnold Schwarzenegger", "Republican", "2003"], ["Gray Davis", "Democratic", "1999"]]
    for i, (state, rows) in enumerate(city_data.items()):
        S = state.title()
        q = ["cities in {}", "largest cities in {}", "biggest cities in {}", "cities in {}", "cities in {}"][i].format(state)
        topics.append(dict(
            query=q, doc=f"cities-{state}", title=f"List of cities in {S}", h2="Cities",
            para=f"The cities of {S} by population.",
            good=(["City", "County", "Population"], [list(r) for r in rows]),
            dpara=f"Governors of {S} since 1999.",
            dh2="Government",
            bad=(["Governor", "Party", "Took office"], governors)))
    river_data = {
        "texas": ["Rio Grande", "Red River", "Brazos River", "Colorado River", "Pecos River", "Trinity River"],
        "washington": ["Columbia River", "Snake River", "Yakima River", "Skagit River", "Spokane River"],
        "california": ["Sacramento River", "San Joaquin River", "Klamath River", "Pit River", "Eel River"],
        "oregon": ["Willamette River", "Deschutes River", "John Day River", "Rogue River"],
    }
    reservoirs = [["Lake Travis", "1,100,000", "1942"], ["Lake Texoma", "2,500,000", "1944"],
                  ["Falcon Lake", "2,600,000", "1954"], ["Lake Livingston", "1,750,000", "1969"]]
    for i, (state, names) in enumerate(river_data.items()):
        S = state.title()
        q = ["rivers in {}", "longest rivers in {}", "major rivers in {}", "rivers in {}"][i].format(state)
        header = ["Name", "Length (mi)", "Mouth"] if i % 2 == 0 else ["River", "Length (mi)", "Mouth"]
        good_rows = [[n, str(rng.randint(80, 1800)), rng.choice(["Pacific Ocean", "Gulf of Mexico", "Columbia River"])] for n in names]
        topics.append(dict(
            query=q, doc=f"rivers-{state}", title=f"Rivers of {S}", h2="Rivers",
            para=f"Rivers in {S} listed by length.",
            good=(header, good_rows),
            dpara=f"Reservoirs in {S} by capacity.", dh2="Reservoirs",
            bad=(["Reservoir", "Capacity (acre-ft)", "Completed"], reservoirs)))
    mountain_data = {
        "washington": ["Mount Rainier", "Mount Adams", "Mount Baker", "Glacier Peak", "Bonanza Peak"],
        "california": ["Mount Whitney", "Mount Williamson", "White Mountain Peak", "Mount Shasta", "North Palisade"],
        "colorado": ["Mount Elbert", "Mount Massive", "Mount Harvard", "Blanca Peak", "La Plata Peak"],
    }
    resorts = [["Crystal Mountain", "11", "1962"], ["Stevens Pass", "10", "1937"],
               ["Mission Ridge", "4", "1966"], ["White Pass", "6", "1953"]]
    for i, (state, names) in enumerate(mountain_data.items()):
        S = state.title()
        q = ["tallest mountains in {}", "mountains in {}", "highest mountains in {}"][i].format(state)
        good_rows = [[n, f"{rng.randint(11, 14)},{rng.randint(100, 999)}", rng.choice(["Cascade Range", "Sierra Nevada", "Sawatch Range"])] for n in names]
        topics.append(dict(
            query=q, doc=f"mountains-{state}", title=f"Mountains of {S}", h2="Peaks",
            para=f"The highest peaks in {S}.",
            good=(["Mountain", "Elevation (ft)", "Range"], good_rows),
            dpara=f"Ski areas in {S}.", dh2="Skiing",
            bad=(["Ski resort", "Lifts", "Opened"], resorts)))
    school_data = {
        "seattle": ["Garfield High School", "Ballard High School", "Roosevelt High School", "Lincoln High School", "Franklin High School"],
        "austin": ["Anderson High School", "Austin High School", "Bowie High School", "McCallum High School", "Crockett High School"],
        "portland": ["Grant High School", "Lincoln High School", "Cleveland High School", "Wilson High School"],
    }
    principals = [["Ted Howard", "2019", "Principal of the year"], ["Ruth Medsker", "2017", "Leadership award"],
                  ["Keven Wynkoop", "2015", "Principal of the year"], ["Kevin Hall", "2013", "Service award"]]
    for i, (city, names) in enumerate(school_data.items()):
        C = city.title()
        q = ["high schools in {}", "schools in {}", "best schools in {}"][i].format(city)
        good_rows = [[n, rng.choice(["North", "South", "Central", "East"]), f"{rng.randint(900, 2100)}"] for n in names]
        topics.append(dict(
            query=q, doc=f"schools-{city}", title=f"Schools in {C}", h2="Schools",
            para=f"Public high schools in {C}.",
            good=(["School", "Neighborhood", "Enrollment"], good_rows),
            dpara=f"Principal awards in {C}.", dh2="Awards",
            bad=(["Principal", "Year", "Award"], principals)))
    film_data = {
        "tom hanks": [["1994", "Forrest Gump", "Forrest Gump"], ["1995", "Apollo 13 (film)", "Jim Lovell"],
                      ["1998", "Saving Private Ryan", "John Miller"], ["2000", "Cast Away", "Chuck Noland"],
                      ["2002", "Road to Perdition (film)", "Michael Sullivan"]],
        "brad pitt": [["1995", "Se7en", "David Mills"], ["1999", "Fight Club (film)", "Tyler Durden"],
                      ["2004", "Troy (film)", "Achilles"], ["2009", "Inglourious Basterds", "Aldo Raine"],
                      ["2011", "Moneyball (film)", "Billy Beane"]],
        "meryl streep": [["1979", "Kramer vs. Kramer", "Joanna Kramer"], ["1982", "Sophie's Choice (film)", "Sophie"],
                         ["2006", "The Devil Wears Prada (film)", "Miranda Priestly"], ["2008", "Doubt (film)", "Aloysius Beauvier"],
                         ["2011", "The Iron Lady", "Margaret Thatcher"]],
        "will smith": [["1996", "Independence Day (film)", "Steven Hiller"], ["1997", "Men in Black", "Agent J"],
                       ["2001", "Ali (film)", "Muhammad Ali"], ["2004", "I, Robot (film)", "Del Spooner"],
                       ["2008", "Hancock (film)", "Hancock"]],
    }
    for i, (actor, rows) in enumerate(film_data.items()):
        A = actor.title()
        q = ["{} films", "films with {}", "best {} films", "{} films"][i].format(actor)
        awards = [["Academy Award", rows[0][0], "Nominated"], ["Golden Globe Award", rows[1][0], "Won"],
                  ["Screen Actors Guild Award", rows[2][0], "Nominated"], ["BAFTA Award", rows[3][0], "Won"]]
        topics.append(dict(
            query=q, doc=f"films-{actor.replace(' ', '-')}", title=f"{A} filmography", h2="Films",
            para=f"{A} has appeared in many productions.",
            good=(["Year", "Film", "Role"], rows),
            dpara=f"Awards received by {A}.", dh2="Awards",
            bad=(["Award", "Year", "Result"], awards)))
    island_rows = [["Whidbey Island", "Island", "168"], ["Orcas Island", "San Juan", "57"],
                   ["San Juan Island", "San Juan", "55"], ["Bainbridge Island", "Kitsap", "28"],
                   ["Vashon Island", "King", "37"]]
    ferries = [["Seattle to Bainbridge", "Washington State Ferries", "35 min"],
               ["Edmonds to Kingston", "Washington State Ferries", "30 min"],
               ["Anacortes to Friday Harbor", "Washington State Ferries", "65 min"],
               ["Mukilteo to Clinton", "Washington State Ferries", "20 min"]]
    topics.append(dict(
        query="islands in washington", doc="islands-washington", title="Islands of Washington", h2="Islands",
        para="Islands in Washington by area.",
        good=(["Island", "County", "Area (sq mi)"], island_rows),
        dpara="Ferry routes serving Washington.", dh2="Ferries",
        bad=(["Ferry route", "Operator", "Crossing"], ferries)))
    buildings = [["Columbia Center", "933", "76"], ["Rainier Square Tower", "850", "58"],
                 ["Two Union Square", "740", "56"], ["Washington Mutual Tower", "772", "55"],
                 ["Seattle Municipal Tower", "722", "62"]]
    architects = [["Chester Lindsey", "Chester Lindsey Architects", "12"],
                  ["John Graham", "John Graham and Company", "20"],
                  ["Fred Bassetti", "Bassetti Architects", "9"],
                  ["Minoru Yamasaki", "Yamasaki and Associates", "15"]]
    topics.append(dict(
        query="tallest buildings in seattle", doc="buildings-seattle", title="Tallest buildings in Seattle",
        h2="Buildings", para="Seattle skyline by height.",
        good=(["Building", "Height (ft)", "Floors"], buildings),
        dpara="Architects who shaped Seattle.", dh2="Architects",
        bad=(["Architect", "Firm", "Projects"], architects)))
    return [with_people_distractor(t, rng) for t in topics]


FIRST = ["Alice", "Bruno", "Carmen", "Dmitri", "Elena", "Farid", "Grace", "Hiro",
         "Ingrid", "Jonas", "Kiran", "Lena", "Marco", "Nadia", "Oscar", "Priya"]
LAST = ["Abbott", "Brenner", "Castillo", "Dunmore", "Eklund", "Fairweather", "Gallo",
        "Haddad", "Ivers", "Jansen", "Kowalski", "Lindqvist", "Moreau", "Novak"]
ROLE = {"City": "Mayor", "Name": "Guide", "River": "Guide", "Mountain": "Climber",
        "School": "Principal", "Film": "Co-star", "Island": "Ranger", "Building": "Architect"}
TYPE_HEADER = {"Name": "River"}


def with_people_distractor(t, rng):
    """Replace the distractor with a people table that names the sought type
    in its second column header, like the co-star table on the tom cruise movies page."""
    header, rows = t["good"]
    subj = 1 if header[0] == "Year" else 0
    names = [r[subj] for r in rows]
    keep = rng.randint(4, len(rows))
    rows = rows[:keep]
    people = rng.sample([f"{a} {b}" for a in FIRST for b in LAST], rng.randint(4, 6))
    bad_rows = [[p, names[i % len(names)], str(rng.randint(1990, 2019))] for i, p in enumerate(people)]
    type_header = TYPE_HEADER.get(header[subj], header[subj])
    shared = f"{t['title']}: facts and figures."
    return dict(t, good=(header, rows), para=shared, dpara=shared, dh2=ROLE[header[subj]] + "s",
                bad=([ROLE[header[subj]], type_header, "Year"], bad_rows))


_order = {}


def main():
    rng = random.Random(20170101)
    write_query_log(rng)
    write_heldout_movies()
    write_traps()
    write_embeddings(random.Random(8))
    write_gold(random.Random(200))
    corpus_rng = random.Random(42)
    # decide section order up front so labels know which table is the answer
    topics = topic_pages(random.Random(42))
    order_rng = random.Random(43)
    for t in topics:
        _order[t["doc"]] = 1 if order_rng.random() < 0.5 else 0
    write_corpus_ordered(topics, corpus_rng)


def write_corpus_ordered(topics, rng):
    for t in topics:
        good = table_html(*t["good"])
        bad = table_html(*t["bad"])
        sections = [(t["h2"], t["para"], good), (t["dh2"], t["dpara"], bad)]
        if _order[t["doc"]] == 1:
            sections.reverse()
        write_page(t["doc"], t["title"], t["title"], sections, round(rng.uniform(0.3, 0.9), 3))
    write_film_pages()
    ranking = []
    labels = []
    doc_ids = [t["doc"] for t in topics]
    for n, t in enumerate(topics):
        other = doc_ids[(n + 7) % len(doc_ids)]
        ranking.append((t["query"], [t["doc"], other]))
        g = _order[t["doc"]]
        labels.append((t["query"], f"{t['doc']}#{g}", 1))
        labels.append((t["query"], f"{t['doc']}#{1 - g}", 0))
        labels.append((t["query"], f"{other}#0", 0))
        labels.append((t["query"], f"{other}#1", 0))
    ranking.append(("tom cruise movies", ["tom-cruise-movies", "tom-cruise-biography"]))
    ranking.append(("2017 tom cruise movies", ["tom-cruise-movies", "tom-cruise-biography"]))
    ranking.append(("michael phelps", ["michael-phelps"]))
    with open(ROOT / "ranking.tsv", "w") as f:
        f.write("# query<TAB>comma-separated doc ids, best first\n")
        for q, docs in ranking:
            f.write(f"{q}\t{','.join(docs)}\n")
    with open(ROOT / "selector_labels.tsv", "w") as f:
        f.write("# query<TAB>table reference<TAB>label\n")
        for q, ref, y in labels:
            f.write(f"{q}\t{ref}\t{y}\n")
    with open(ROOT / "film_pair_labels.tsv", "w") as f:
        f.write("# query<TAB>table reference<TAB>label\n")
        f.write("tom cruise movies\ttom-cruise-movies#0\t1\n")
        f.write("tom cruise movies\ttom-cruise-movies#1\t0\n")
        f.write("tom cruise movies\ttom-cruise-biography#0\t0\n")


if __name__ == "__main__":
    main()
