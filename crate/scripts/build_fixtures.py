#!/usr/bin/env python3
"""Regenerates the offline fixture corpus.

Writes synthetic page snapshots, language links and item ids under
fixtures/cache, the expected corpus statistics under fixtures/golden, the
header alias file under mappings/ and the dataset manifests under datasets/.

The snapshots are reconstructions, not captured pages: their table,
reference and column counts follow fixtures/golden/corpus_stats.json, and the
cell values carry the documented cross-language disagreements. Everything
is derived from the tables below, so running the script twice produces
identical files.
"""

import hashlib
import json
import math
import shutil
from pathlib import Path
from urllib.parse import quote

ROOT = Path(__file__).resolve().parent.parent
LANGS = ["en", "de", "zh", "it", "nl"]
FETCHED_AT = "2025-06-01T12:00:00Z"
MISSING_TOKENS = ["—", "–", "?", "n/a", ""]
COMMA_DECIMAL = {"de", "it", "nl"}

OTHER_LANGS = [
    "af", "ar", "az", "be", "bg", "bn", "ca", "cs", "cy", "da", "el", "eo", "es", "et", "eu",
    "fa", "fi", "fr", "ga", "gl", "he", "hi", "hr", "hu", "hy", "id", "is", "ja", "ka", "kk",
    "ko", "la", "lt", "lv", "mk", "ml", "mn", "mr", "ms", "nn", "no", "pl", "pt", "ro", "ru",
    "sh", "simple", "sk", "sl", "sq", "sr", "sv", "ta", "th", "tr", "uk", "ur", "uz", "vi",
]


def h(*parts):
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).hexdigest()
    return int(digest[:12], 16)


def round1(x):
    return math.floor(x * 10 + 0.5) / 10


def fmt_int(n, lang):
    s = f"{n:,}"
    return s.replace(",", ".") if lang in COMMA_DECIMAL else s


def fmt_dec(x, lang):
    s = f"{x:.1f}"
    return s.replace(".", ",") if lang in COMMA_DECIMAL else s


# Header text per attribute and language.
HEADERS = {
    "rank": {"en": "Rank", "de": "Rang", "zh": "排名", "it": "Pos.", "nl": "Rang"},
    "height": {"en": "Height (m)", "de": "Höhe (m)", "zh": "海拔（米）", "it": "Altezza (m)", "nl": "Hoogte (m)"},
    "prominence": {"en": "Prominence (m)", "de": "Schartenhöhe (m)", "zh": "地形突起（米）", "it": "Prominenza (m)", "nl": "Prominentie (m)"},
    "first_ascent": {"en": "First ascent", "de": "Erstbesteigung", "zh": "首次登顶", "it": "Prima salita", "nl": "Eerste beklimming"},
    "ascents": {"en": "Ascents", "de": "Besteigungen gesamt", "zh": "登顶人次", "it": "Salite", "nl": "Beklimmingen"},
    "deaths": {"en": "Deaths", "de": "Todesfälle", "zh": "死亡人数", "it": "Morti", "nl": "Doden"},
    "death_rate": {"en": "Death rate", "de": "Tote / Besteigungen", "zh": "死亡率", "it": "Tasso di mortalità", "nl": "Sterftecijfer"},
    "year": {"en": "Year", "de": "Jahr", "zh": "年份", "it": "Anno", "nl": "Jaar"},
    "magnitude": {"en": "Magnitude", "de": "Magnitude", "zh": "震级", "it": "Magnitudo", "nl": "Magnitude"},
    "fatalities": {"en": "Fatalities", "de": "Todesopfer", "zh": "遇难人数", "it": "Vittime", "nl": "Dodental"},
    "area": {"en": "Area (km²)", "de": "Fläche (km²)", "zh": "面积（平方公里）", "it": "Superficie (km²)", "nl": "Oppervlakte (km²)"},
    "depth": {"en": "Max. depth (m)", "de": "Max. Tiefe (m)", "zh": "最大深度（米）", "it": "Profondità max (m)", "nl": "Max. diepte (m)"},
    "volume": {"en": "Volume (km³)", "de": "Volumen (km³)", "zh": "蓄水量（立方公里）", "it": "Volume (km³)", "nl": "Volume (km³)"},
    "period": {"en": "Period", "de": "Zeitraum", "zh": "期间", "it": "Periodo", "nl": "Periode"},
    "nationality": {"en": "Nationality", "de": "Nationalität", "zh": "国籍", "it": "Nazionalità", "nl": "Nationaliteit"},
    "without_oxygen": {"en": "Without supplemental oxygen", "de": "Ohne Flaschensauerstoff"},
    "duration": {"zh": "用时（年）", "it": "Durata (anni)"},
    "gender": {"it": "Genere"},
    "new_route": {"nl": "Nieuwe route"},
    "winter_ascent": {"nl": "Winterbeklimming"},
}
NAME_HEADERS = {
    "mountain": {"en": "Mountain", "de": "Berg", "zh": "山峰", "it": "Montagna", "nl": "Berg"},
    "quake": {"en": "Event", "de": "Ereignis", "zh": "地震", "it": "Evento", "nl": "Gebeurtenis"},
    "lake": {"en": "Lake", "de": "See", "zh": "湖泊", "it": "Lago", "nl": "Meer"},
    "climber": {"en": "Name", "de": "Name", "zh": "姓名", "it": "Nome", "nl": "Naam"},
}
SERIES = {
    "mountain": ("ascents", {"en": "Ascents", "de": "Besteigungen", "zh": "登顶次数", "it": "Salite per anno", "nl": "Beklimmingen per jaar"}),
    "quake": ("reports", {"en": "Reports", "de": "Berichte", "zh": "报告", "it": "Rapporti", "nl": "Rapporten"}),
    "lake": ("surveys", {"en": "Surveys", "de": "Vermessungen", "zh": "测量", "it": "Rilievi", "nl": "Metingen"}),
}
SERIES_LAST_YEAR = 2024

# Entities: key -> names per language (falls back to en), real QID if known.
REAL_QIDS = {"everest": 513, "k2": 43512}
LOCAL_NAMES = {
    "everest": {"en": "Mount Everest", "zh": "珠穆朗玛峰", "it": "Everest"},
    "k2": {"en": "K2", "zh": "乔戈里峰"},
    "kangchenjunga": {"en": "Kangchenjunga", "zh": "干城章嘉峰", "de": "Kangchendzönga"},
    "lhotse": {"en": "Lhotse", "zh": "洛子峰"},
    "makalu": {"en": "Makalu", "zh": "马卡鲁峰"},
    "mont_blanc": {"en": "Mont Blanc", "it": "Monte Bianco", "zh": "勃朗峰"},
    "aconcagua": {"en": "Aconcagua", "zh": "阿空加瓜山"},
    "kilimanjaro": {"en": "Mount Kilimanjaro", "de": "Kilimandscharo", "zh": "乞力马扎罗山", "it": "Kilimangiaro"},
    "ladoga": {"en": "Lake Ladoga", "de": "Ladogasee", "it": "Lago Ladoga", "nl": "Ladogameer", "zh": "拉多加湖"},
    "onega": {"en": "Lake Onega", "de": "Onegasee", "it": "Lago Onega", "nl": "Onegameer", "zh": "奥涅加湖"},
}


def name_of(key, display, lang):
    return LOCAL_NAMES.get(key, {}).get(lang) or LOCAL_NAMES.get(key, {}).get("en") or display


QIDS = {}


def qid_of(key):
    if key not in QIDS:
        QIDS[key] = REAL_QIDS.get(key, 9_000_001 + len([k for k in QIDS if k not in REAL_QIDS]))
    return QIDS[key]


def key_of(display):
    return display.lower().replace(" ", "_").replace("–", "-")


# Family data. Each entity: (key, display name, {attribute: value}).

SS = [
    ("everest", "Mount Everest", {"height": 8849, "prominence": 8849, "first_ascent": 1953, "ascents": 11996, "deaths": 335}),
    ("aconcagua", "Aconcagua", {"height": 6961, "prominence": 6961, "first_ascent": 1897, "ascents": 3604, "deaths": 43}),
    ("denali", "Denali", {"height": 6190, "prominence": 6144, "first_ascent": 1913, "ascents": 2188, "deaths": 29}),
    ("kilimanjaro", "Mount Kilimanjaro", {"height": 5895, "prominence": 5885, "first_ascent": 1889, "ascents": 9211, "deaths": 17}),
    ("elbrus", "Mount Elbrus", {"height": 5642, "prominence": 4741, "first_ascent": 1874, "ascents": 5107, "deaths": 33}),
    ("vinson", "Vinson Massif", {"height": 4892, "prominence": 4892, "first_ascent": 1966, "ascents": 1403, "deaths": 3}),
    ("puncak_jaya", "Puncak Jaya", {"height": 4884, "prominence": 4884, "first_ascent": 1962, "ascents": 611, "deaths": 7}),
    ("mont_blanc", "Mont Blanc", {"height": 4808, "prominence": 4696, "first_ascent": 1786, "ascents": 8702, "deaths": 101}),
    ("kosciuszko", "Mount Kosciuszko", {"height": 2228, "prominence": 2228, "first_ascent": 1840, "ascents": 7313, "deaths": 1}),
]

ET = [
    ("everest", "Mount Everest", {"height": 8849, "ascents": 11996, "deaths": 335}),
    ("k2", "K2", {"height": 8611, "ascents": 302, "deaths": 80}),
    ("kangchenjunga", "Kangchenjunga", {"height": 8586, "ascents": 532, "deaths": 40}),
    ("lhotse", "Lhotse", {"height": 8516, "ascents": 700, "deaths": 31}),
    ("makalu", "Makalu", {"height": 8485, "ascents": 531, "deaths": 37}),
    ("cho_oyu", "Cho Oyu", {"height": 8188, "ascents": 3138, "deaths": 52}),
    ("dhaulagiri", "Dhaulagiri I", {"height": 8167, "ascents": 546, "deaths": 84}),
    ("manaslu", "Manaslu", {"height": 8163, "ascents": 2028, "deaths": 93}),
    ("nanga_parbat", "Nanga Parbat", {"height": 8126, "ascents": 398, "deaths": 87}),
    ("annapurna", "Annapurna I", {"height": 8091, "ascents": 365, "deaths": 72}),
    ("gasherbrum_i", "Gasherbrum I", {"height": 8080, "ascents": 367, "deaths": 31}),
    ("broad_peak", "Broad Peak", {"height": 8051, "ascents": 444, "deaths": 30}),
    ("gasherbrum_ii", "Gasherbrum II", {"height": 8035, "ascents": 1003, "deaths": 22}),
    ("shishapangma", "Shishapangma", {"height": 8027, "ascents": 325, "deaths": 31}),
]

CLIMBERS = [
    ("messner", "Reinhold Messner", {"period": "1970–1986", "nationality": ("Italy", "Italien", "意大利", "Italia", "Italië"), "without_oxygen": True, "duration": 16, "gender": "M", "new_route": True, "winter_ascent": False}),
    ("kukuczka", "Jerzy Kukuczka", {"period": "1979–1987", "nationality": ("Poland", "Polen", "波兰", "Polonia", "Polen"), "without_oxygen": False, "duration": 8, "gender": "M", "new_route": True, "winter_ascent": True}),
    ("loretan", "Erhard Loretan", {"period": "1982–1995", "nationality": ("Switzerland", "Schweiz", "瑞士", "Svizzera", "Zwitserland"), "without_oxygen": True, "duration": 13, "gender": "M", "new_route": True, "winter_ascent": False}),
    ("carsolio", "Carlos Carsolio", {"period": "1985–1996", "nationality": ("Mexico", "Mexiko", "墨西哥", "Messico", "Mexico"), "without_oxygen": False, "duration": 11, "gender": "M", "new_route": True, "winter_ascent": False}),
    ("wielicki", "Krzysztof Wielicki", {"period": "1980–1996", "nationality": ("Poland", "Polen", "波兰", "Polonia", "Polen"), "without_oxygen": False, "duration": 16, "gender": "M", "new_route": False, "winter_ascent": True}),
    ("oiarzabal", "Juanito Oiarzabal", {"period": "1985–1999", "nationality": ("Spain", "Spanien", "西班牙", "Spagna", "Spanje"), "without_oxygen": False, "duration": 14, "gender": "M", "new_route": False, "winter_ascent": False}),
    ("martini", "Sergio Martini", {"period": "1976–2000", "nationality": ("Italy", "Italien", "意大利", "Italia", "Italië"), "without_oxygen": False, "duration": 24, "gender": "M", "new_route": False, "winter_ascent": False}),
    ("park", "Park Young-seok", {"period": "1993–2001", "nationality": ("South Korea", "Südkorea", "韩国", "Corea del Sud", "Zuid-Korea"), "without_oxygen": False, "duration": 8, "gender": "M", "new_route": False, "winter_ascent": False}),
    ("inurrategi", "Alberto Iñurrategi", {"period": "1991–2002", "nationality": ("Spain", "Spanien", "西班牙", "Spagna", "Spanje"), "without_oxygen": True, "duration": 11, "gender": "M", "new_route": False, "winter_ascent": False}),
    ("pasaban", "Edurne Pasaban", {"period": "2001–2010", "nationality": ("Spain", "Spanien", "西班牙", "Spagna", "Spanje"), "without_oxygen": False, "duration": 9, "gender": "F", "new_route": False, "winter_ascent": False}),
]

HM_EXTRA = [
    ("Gyachung Kang", 7952), ("Gasherbrum III", 7946), ("Annapurna II", 7937), ("Gasherbrum IV", 7932),
    ("Himalchuli", 7893), ("Distaghil Sar", 7885), ("Ngadi Chuli", 7871), ("Nuptse", 7861),
    ("Khunyang Chhish", 7852), ("Masherbrum", 7821), ("Nanda Devi", 7816), ("Chomo Lonzo", 7804),
    ("Batura Sar", 7795), ("Rakaposhi", 7788), ("Namcha Barwa", 7782), ("Kanjut Sar", 7760),
]
HM = [(k, n, {"height": v["height"], "prominence": v["height"] - h("prom", k) % 4000, "first_ascent": 1950 + h("fa", k) % 40}) for k, n, v in ET]
HM += [(key_of(n), n, {"height": m, "prominence": 400 + h("prom", n) % 2500, "first_ascent": 1950 + h("fa", n) % 40}) for n, m in HM_EXTRA]
HM[0][2]["prominence"] = 8849

AL_PEAKS = [
    ("Mont Blanc", 4808, 4696, 1786), ("Dufourspitze", 4634, 2165, 1855), ("Nordend", 4609, 94, 1861),
    ("Zumsteinspitze", 4563, 110, 1820), ("Signalkuppe", 4554, 102, 1842), ("Dom", 4545, 1046, 1858),
    ("Lyskamm", 4527, 376, 1861), ("Weisshorn", 4506, 1235, 1861), ("Täschhorn", 4491, 206, 1862),
    ("Matterhorn", 4478, 1040, 1865), ("Mont Maudit", 4465, 130, 1878), ("Parrotspitze", 4432, 63, 1863),
    ("Dent Blanche", 4357, 915, 1862), ("Nadelhorn", 4327, 121, 1858), ("Grand Combin", 4314, 1517, 1859),
    ("Lenzspitze", 4294, 47, 1870), ("Finsteraarhorn", 4274, 2280, 1829), ("Mont Blanc du Tacul", 4248, 50, 1855),
    ("Stecknadelhorn", 4241, 54, 1887), ("Castor", 4223, 175, 1861),
]
AL = [(key_of(n), n, {"height": a, "prominence": p, "first_ascent": y}) for n, a, p, y in AL_PEAKS]

UP = [
    (key_of(n), n, {"height": m, "prominence": p})
    for n, m, p in [
        ("Gangkhar Puensum", 7570, 2995), ("Muchu Chhish", 7453, 263), ("Labuche Kang III", 7250, 570),
        ("Karjiang", 7221, 880), ("Tongshanjiabu", 7207, 1757), ("Kabru South", 7178, 120),
        ("Mount Kailash", 6638, 1319), ("Zemu Gap Peak", 5779, 130),
    ]
]

EQ = [
    (key_of(n), n, {"year": y, "magnitude": m, "fatalities": d})
    for n, y, m, d in [
        ("1960 Valdivia earthquake", 1960, 9.5, 1655), ("1964 Alaska earthquake", 1964, 9.2, 131),
        ("2004 Indian Ocean earthquake", 2004, 9.1, 227898), ("2011 Tōhoku earthquake", 2011, 9.1, 19759),
        ("1952 Severo-Kurilsk earthquake", 1952, 9.0, 2336), ("2010 Chile earthquake", 2010, 8.8, 525),
        ("1906 Ecuador–Colombia earthquake", 1906, 8.8, 1500), ("1965 Rat Islands earthquake", 1965, 8.7, 0),
        ("1950 Assam–Tibet earthquake", 1950, 8.7, 4800), ("2005 Nias–Simeulue earthquake", 2005, 8.6, 1314),
        ("2012 Indian Ocean earthquakes", 2012, 8.6, 10), ("1957 Andreanof Islands earthquake", 1957, 8.6, 0),
        ("1946 Aleutian Islands earthquake", 1946, 8.6, 165), ("1922 Vallenar earthquake", 1922, 8.5, 1000),
        ("1923 Great Kantō earthquake", 1923, 7.9, 105385), ("2023 Turkey–Syria earthquakes", 2023, 7.8, 59488),
    ]
]

LT = [
    (key_of(n), n, {"area": a})
    for n, a in [
        ("Kraken Mare", 400000), ("Ligeia Mare", 126000), ("Punga Mare", 61000), ("Jingpo Lacus", 20000),
        ("Ontario Lacus", 15000), ("Bolsena Lacus", 101), ("Feia Lacus", 1190), ("Kivu Lacus", 880),
        ("Koitere Lacus", 68), ("Neagh Lacus", 98), ("Mackay Lacus", 1560), ("Sotonera Lacus", 82),
    ]
]

LE = [
    (k, n, {"area": a, "depth": d})
    for k, n, a, d in [
        ("ladoga", "Lake Ladoga", 17700, 230.0), ("onega", "Lake Onega", 9700, 127.0),
        ("vanern", "Vänern", 5650, 106.0), ("saimaa", "Saimaa", 4400, 85.8), ("peipus", "Lake Peipus", 3555, 15.3),
        ("vattern", "Vättern", 1893, 128.0), ("malaren", "Mälaren", 1140, 61.0), ("paijanne", "Päijänne", 1080, 95.3),
        ("inari", "Lake Inari", 1040, 92.0), ("balaton", "Lake Balaton", 592, 12.2), ("geneva", "Lake Geneva", 580, 310.0),
        ("constance", "Lake Constance", 536, 251.0),
    ]
]

LA = [
    (k, n, {"area": a, "depth": d, "volume": v})
    for k, n, a, d, v in [
        ("caspian", "Caspian Sea", 371000, 1025.0, 78200), ("superior", "Lake Superior", 82100, 406.3, 12100),
        ("victoria", "Lake Victoria", 68870, 83.0, 2750), ("huron", "Lake Huron", 59600, 229.0, 3540),
        ("michigan", "Lake Michigan", 58000, 281.0, 4900), ("tanganyika", "Lake Tanganyika", 32600, 1470.0, 18900),
        ("baikal", "Lake Baikal", 31500, 1642.0, 23615), ("great_bear", "Great Bear Lake", 31000, 446.0, 2236),
        ("malawi", "Lake Malawi", 29500, 706.0, 8400), ("great_slave", "Great Slave Lake", 27200, 614.0, 1560),
        ("erie", "Lake Erie", 25700, 64.0, 489), ("winnipeg", "Lake Winnipeg", 24514, 36.0, 284),
        ("ontario", "Lake Ontario", 18960, 244.0, 1640), ("ladoga", "Lake Ladoga", 17700, 230.0, 908),
        ("balkhash", "Lake Balkhash", 16400, 26.0, 106), ("onega", "Lake Onega", 9700, 127.0, 280),
    ]
]

# Per article: titles, kind, entity list, attributes per language, rows per
# language, language-version count, and the per-page counts:
# (tables, references, main columns, incomplete main columns) per language.
ARTICLES = [
    {
        "id": "seven_summits", "kind": "mountain", "versions": 58, "entities": SS,
        "titles": {"en": "Seven Summits", "de": "Seven Summits", "zh": "七大洲最高峰", "it": "Sette vette", "nl": "Seven Summits"},
        "attrs": {"en": ["height", "prominence", "first_ascent"], "de": ["height", "first_ascent", "death_rate"], "zh": ["height", "death_rate"], "it": ["height", "death_rate"], "nl": ["height", "prominence"]},
        "rows": {"en": 9, "de": 9, "zh": 9, "it": 8, "nl": 9},
        "pages": {"en": (4, 58, 30, 4), "de": (3, 31, 24, 9), "zh": (3, 14, 20, 3), "it": (2, 18, 14, 2), "nl": (2, 6, 10, 1)},
        "main_index": {"en": 1},
    },
    {
        "id": "eight_thousander", "kind": "mountain", "versions": 57, "entities": ET,
        "titles": {"en": "Eight-thousander", "de": "Achttausender", "zh": "八千米级山峰", "it": "Ottomila", "nl": "Achtduizender"},
        "attrs": {"en": ["height", "ascents", "deaths"], "de": ["height", "death_rate"], "zh": ["height", "ascents", "death_rate"], "it": ["height", "death_rate"], "nl": ["height", "ascents"]},
        "rows": {l: 14 for l in LANGS},
        "pages": {"en": (8, 264, 33, 7), "de": (4, 45, 28, 11), "zh": (5, 21, 25, 4), "it": (3, 24, 18, 3), "nl": (2, 9, 12, 2)},
        "climbers": True,
    },
    {
        "id": "alps_4000", "kind": "mountain", "versions": 15, "entities": AL,
        "titles": {"en": "List of mountains of the Alps over 4000 metres", "de": "Liste der Viertausender in den Alpen", "zh": "阿尔卑斯山脉4000米以上山峰列表", "it": "Vette delle Alpi oltre i 4000 metri", "nl": "Lijst van bergen in de Alpen boven de 4000 meter"},
        "attrs": {"en": ["height", "prominence", "first_ascent"], "de": ["height", "prominence", "first_ascent"], "it": ["height", "prominence"]},
        "rows": {"en": 20, "de": 20, "it": 15},
        "pages": {"en": (3, 41, 28, 5), "de": (9, 52, 36, 14), "zh": (0, 3, 0, 0), "it": (4, 27, 17, 2), "nl": (0, 2, 0, 0)},
    },
    {
        "id": "earthquakes", "kind": "quake", "versions": 38, "entities": EQ,
        "titles": {"en": "Lists of earthquakes", "de": "Liste von Erdbeben", "zh": "地震列表", "it": "Terremoti", "nl": "Lijst van aardbevingen"},
        "attrs": {"en": ["year", "magnitude", "fatalities"], "de": ["year", "magnitude", "fatalities"], "zh": ["year", "magnitude", "fatalities"], "it": ["year", "magnitude"], "nl": ["year", "magnitude"]},
        "rows": {"en": 16, "de": 14, "zh": 12, "it": 10, "nl": 8},
        "pages": {"en": (16, 236, 35, 9), "de": (5, 38, 27, 10), "zh": (8, 25, 24, 5), "it": (3, 21, 16, 2), "nl": (2, 7, 10, 2)},
    },
    {
        "id": "unclimbed_peaks", "kind": "mountain", "versions": 6, "entities": UP,
        "titles": {"en": "List of highest unclimbed peaks", "de": "Liste der höchsten unbestiegenen Berge", "zh": "未登峰列表", "it": "Vette inviolate", "nl": "Lijst van onbeklommen bergen"},
        "attrs": {"en": ["height", "prominence"], "de": ["height"], "nl": ["height"]},
        "rows": {"en": 8, "de": 7, "nl": 6},
        "pages": {"en": (2, 22, 24, 3), "de": (1, 12, 18, 7), "zh": (0, 0, 0, 0), "it": (0, 4, 0, 0), "nl": (1, 3, 8, 1)},
    },
    {
        "id": "highest_mountains", "kind": "mountain", "versions": 47, "entities": HM,
        "titles": {"en": "List of highest mountains on Earth", "de": "Liste der höchsten Berge der Erde", "zh": "世界最高山峰列表", "it": "Montagne più alte della Terra", "nl": "Lijst van hoogste bergen op aarde"},
        "attrs": {"en": ["height", "prominence", "first_ascent"], "de": ["height", "prominence", "first_ascent"], "zh": ["height", "prominence"], "it": ["height", "first_ascent"], "nl": ["height"]},
        "rows": {"en": 30, "de": 30, "zh": 24, "it": 20, "nl": 16},
        "pages": {"en": (4, 87, 34, 8), "de": (6, 41, 34, 13), "zh": (4, 12, 22, 4), "it": (2, 16, 15, 2), "nl": (1, 5, 12, 2)},
    },
    {
        "id": "lakes_of_titan", "kind": "lake", "versions": 18, "entities": LT,
        "titles": {"en": "Lakes of Titan", "de": "Seen auf Titan", "zh": "土卫六湖泊", "it": "Laghi di Titano", "nl": "Meren op Titan"},
        "attrs": {"en": ["area"], "de": ["area"], "zh": ["area"]},
        "rows": {"en": 12, "de": 8, "zh": 10},
        "pages": {"en": (3, 64, 26, 5), "de": (1, 22, 20, 8), "zh": (2, 70, 18, 3), "it": (0, 9, 0, 0), "nl": (0, 4, 0, 0)},
    },
    {
        "id": "largest_lakes_europe", "kind": "lake", "versions": 18, "entities": LE,
        "titles": {"en": "List of largest lakes of Europe", "de": "Liste der größten Seen in Europa", "zh": "欧洲最大湖泊列表", "it": "Laghi più grandi d'Europa", "nl": "Lijst van grootste meren van Europa"},
        "attrs": {"en": ["area", "depth"], "de": ["area", "depth"], "it": ["area"]},
        "rows": {"en": 12, "de": 12, "it": 10},
        "pages": {"en": (5, 29, 28, 5), "de": (2, 19, 20, 7), "zh": (0, 2, 0, 0), "it": (1, 14, 14, 1), "nl": (0, 3, 0, 0)},
    },
    {
        "id": "lakes_by_area", "kind": "lake", "versions": 46, "entities": LA,
        "titles": {"en": "List of lakes by area", "de": "Liste der größten Seen", "zh": "湖泊面积列表", "it": "Laghi per superficie", "nl": "Lijst van grootste meren"},
        "attrs": {"en": ["area", "depth", "volume"], "de": ["area", "depth"], "zh": ["area", "depth"], "it": ["area"], "nl": ["area"]},
        "rows": {"en": 16, "de": 16, "zh": 14, "it": 12, "nl": 10},
        "pages": {"en": (10, 50, 33, 6), "de": (2, 26, 22, 8), "zh": (3, 10, 24, 3), "it": (2, 19, 16, 2), "nl": (2, 5, 10, 1)},
        "main_index": {"en": 2},
    },
]

CLIMBER_ATTRS = {
    "en": ["period", "nationality", "without_oxygen"],
    "de": ["period", "nationality", "without_oxygen"],
    "zh": ["period", "nationality", "duration"],
    "it": ["period", "nationality", "duration", "gender"],
    "nl": ["period", "nationality", "new_route", "winter_ascent"],
}
YES = {"en": ("Yes", "No"), "de": ("Ja", "Nein"), "zh": ("是", "否"), "it": ("Sì", "No"), "nl": ("Ja", "Nee")}


def revision(article_id, lang):
    if (article_id, lang) == ("seven_summits", "de"):
        return 118_000_000 + h("rev", article_id, lang) % 1_000_000, "2023-09-12T10:24:00Z"
    day = 1 + (h("day", article_id, lang) % 6)
    hour = h("hour", article_id, lang) % 24
    return 125_000_000 + h("rev", article_id, lang) % 1_000_000, f"2025-05-{day:02d}T{hour:02d}:00:00Z"


def href(title, lang):
    path = quote(title.replace(" ", "_"), safe="()',-.:_")
    return f"./{path}" if lang in ("it", "nl") else f"/wiki/{path}"


def esc(text):
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def link(title, label, lang):
    return f'<a href="{href(title, lang)}" title="{esc(title)}">{esc(label)}</a>'


QID_TITLES = {lang: {} for lang in LANGS}


def value_text(attr, value, entity_key, lang, article_id):
    if attr == "height" and article_id == "seven_summits" and entity_key == "everest" and lang == "de":
        return fmt_int(8848, lang)
    if attr == "height" and article_id == "seven_summits" and lang == "zh":
        return fmt_int(value, lang) + "米"
    if attr == "death_rate":
        a, d = value
        if lang == "de":
            return f"{d}/{a}"
        pct = round1(100 * d / a)
        assert abs(pct - 100 * d / a) < 0.049, (entity_key, pct, d, a)
        if lang == "zh" and entity_key == "k2":
            pct = 29.5
        return fmt_dec(pct, lang) + ("%" if lang == "zh" else " %")
    if isinstance(value, float):
        return fmt_dec(value, lang)
    if attr in ("year", "first_ascent"):
        return str(value)
    return fmt_int(value, lang)


def ref_sup(n):
    return f'<sup id="cite_ref-{n}" class="reference"><a href="#cite_note-{n}">[{n}]</a></sup>'


def th(text, rowspan=1, colspan=1):
    attrs = ""
    if rowspan > 1:
        attrs += f' rowspan="{rowspan}"'
    if colspan > 1:
        attrs += f' colspan="{colspan}"'
    return f"<th{attrs}>{esc(text)}</th>"


def main_table(article, lang, n_cols, n_incomplete, links):
    kind = article["kind"]
    attrs = article["attrs"][lang]
    series_key, series_label = SERIES[kind]
    n_series = n_cols - 2 - len(attrs)
    assert n_series >= max(1, n_incomplete), (article["id"], lang)
    years = list(range(SERIES_LAST_YEAR - n_series + 1, SERIES_LAST_YEAR + 1))
    rows = article["entities"][: article["rows"][lang]]

    out = ['<table class="wikitable sortable">', f"<caption>{esc(article['titles'][lang])}</caption>", "<tbody>"]
    top = [th(HEADERS["rank"][lang], rowspan=2), th(NAME_HEADERS[kind][lang], rowspan=2)]
    top += [th(HEADERS[a][lang], rowspan=2) for a in attrs]
    top.append(th(series_label[lang], colspan=n_series))
    out.append("<tr>" + "".join(top) + "</tr>")
    out.append("<tr>" + "".join(th(str(y)) for y in years) + "</tr>")

    missing_at = {}
    for i in range(n_incomplete):
        missing_at[(h("miss", article["id"], lang, i) % len(rows), 2 + len(attrs) + i)] = MISSING_TOKENS[i % len(MISSING_TOKENS)]

    order = [e[0] for e in article["entities"]]
    for r, (key, display, values) in enumerate(rows):
        title = name_of(key, display, lang)
        links[title] = qid_of(key)
        cells = [f"<td>{order.index(key) + 1}</td>"]
        name_cell = link(title, title, lang)
        if article["id"] == "highest_mountains" and lang == "en":
            name_cell = f'<span class="sortkey" style="display:none">{esc(display)} !</span>' + name_cell
        cells.append(f"<td>{name_cell}</td>")
        for a in attrs:
            value = (values["ascents"], values["deaths"]) if a == "death_rate" else values[a]
            text = esc(value_text(a, value, key, lang, article["id"]))
            if r == 0 and a == attrs[0]:
                text += ref_sup(1)
            cells.append(f'<td style="text-align:right">{text}</td>')
        for j, y in enumerate(years):
            col = 2 + len(attrs) + j
            text = missing_at.get((r, col))
            if text is None:
                text = str(h("series", key, series_key, y) % 400)
            cells.append(f"<td>{esc(text)}</td>")
        out.append("<tr>" + "".join(cells) + "</tr>")
    out.append("</tbody></table>")
    return "\n".join(out)


def climbers_table(lang, links):
    attrs = CLIMBER_ATTRS[lang]
    captions = {"en": "Climbers who summited all 14 eight-thousanders", "de": "Bergsteiger mit allen 14 Achttausendern", "zh": "登顶全部14座八千米级山峰的登山者", "it": "Alpinisti che hanno salito tutti i 14 ottomila", "nl": "Klimmers die alle 14 achtduizenders beklommen"}
    out = ['<table class="wikitable">', f"<caption>{esc(captions[lang])}</caption>", "<tr>"]
    out.append(th(HEADERS["rank"][lang]) + th(NAME_HEADERS["climber"][lang]) + "".join(th(HEADERS[a][lang]) for a in attrs) + "</tr>")
    li = LANGS.index(lang)
    for r, (key, display, values) in enumerate(CLIMBERS):
        links[display] = qid_of(key)
        cells = [f"<td>{r + 1}</td>", f"<td>{link(display, display, lang)}</td>"]
        for a in attrs:
            v = values[a]
            if a == "nationality":
                text = v[li]
            elif isinstance(v, bool):
                text = YES[lang][0] if v else YES[lang][1]
            else:
                text = str(v)
            cells.append(f"<td>{esc(text)}</td>")
        out.append("<tr>" + "".join(cells) + "</tr>")
    out.append("</table>")
    return "\n".join(out)


SECONDARY_HEADERS = {
    "en": ("Note", "Source", "Remark"), "de": ("Anmerkung", "Quelle", "Bemerkung"), "zh": ("注释", "来源", "备注"),
    "it": ("Nota", "Fonte", "Osservazione"), "nl": ("Noot", "Bron", "Opmerking"),
}


def secondary_table(article, lang, idx, links):
    """A small table: notes without links, or a see-also list whose links have no item."""
    n_rows = 2 + h("rows", article["id"], lang, idx) % 3
    n_cols = 2 + h("cols", article["id"], lang, idx) % 2
    heads = SECONDARY_HEADERS[lang][:n_cols]
    out = ['<table class="wikitable">', "<tr>" + "".join(th(x) for x in heads) + "</tr>"]
    with_links = idx % 2 == 1
    for r in range(n_rows):
        cells = []
        for c in range(n_cols):
            text = f"{heads[c]} {idx}.{r + 1}"
            if c == 0 and with_links:
                target = f"{article['titles']['en']} (note {idx}.{r + 1})"
                links[target] = None
                cells.append(f"<td>{link(target, text, lang)}</td>")
            elif c == 1 and r == 0 and n_rows > 2:
                cells.append(f'<td rowspan="2">{esc(text)}</td>')
            elif c == 1 and r == 1 and n_rows > 2:
                continue
            else:
                cells.append(f"<td>{esc(text)}</td>")
        out.append("<tr>" + "".join(cells) + "</tr>")
    out.append("</table>")
    return "\n".join(out)


def references(count):
    if count == 0:
        return ""
    items = [f'<li id="cite_note-{n}"><span class="mw-cite-backlink"><a href="#cite_ref-{n}">^</a></span> <span class="reference-text">Source {n}.</span></li>' for n in range(1, count + 1)]
    if count > 40:
        split = count // 10
        return ('<div class="reflist"><ol class="references">' + "".join(items[:split]) + "</ol></div>\n"
                '<div class="reflist"><ol class="references">' + "".join(items[split:]) + "</ol></div>")
    return '<div class="reflist"><ol class="references">' + "".join(items) + "</ol></div>"


def page_html(article, lang):
    n_tables, n_refs, n_cols, n_incomplete = article["pages"][lang]
    links = QID_TITLES[lang]
    parts = [f'<div class="mw-content-ltr mw-parser-output" lang="{lang}" dir="ltr">']
    parts.append(f'<table class="infobox"><tr><th>{esc(article["titles"][lang])}</th></tr></table>')
    intro = esc(article["titles"][lang]) + (ref_sup(1) if n_refs else "")
    parts.append(f"<p><b>{intro}</b></p>")
    main_index = None
    if n_tables:
        main_index = article.get("main_index", {}).get(lang, 0)
        tables = []
        secondary = 0
        for i in range(n_tables):
            if i == main_index:
                tables.append(main_table(article, lang, n_cols, n_incomplete, links))
            elif article.get("climbers") and i == 1:
                tables.append(climbers_table(lang, links))
            else:
                tables.append(secondary_table(article, lang, secondary, links))
                secondary += 1
        parts.extend(tables)
    if lang == "en":
        parts.append('<table class="wikitable metadata"><tr><td>This list is incomplete.</td></tr></table>')
    parts.append(f'<div class="navbox"><table class="wikitable"><tr><th>{esc(article["titles"][lang])}</th></tr><tr><td>navigation</td></tr></table></div>')
    parts.append(references(n_refs))
    parts.append("</div>")
    return "\n".join(p for p in parts if p), main_index


def encode(title):
    return quote(title, safe="-._~")


def write_json(path, value):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(value, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def aggregate(pages):
    agg = {"pages": len(pages), "tables": 0, "references": 0, "mean_references": 0.0, "total_columns": 0,
           "complete_columns": 0, "incomplete_columns": 0, "incompleteness_rate": 0.0}
    for p in pages:
        agg["tables"] += p["table_count"]
        agg["references"] += p["reference_count"]
        agg["total_columns"] += p["total_columns"]
        agg["complete_columns"] += p["complete_columns"]
        agg["incomplete_columns"] += p["incomplete_columns"]
    if pages:
        agg["mean_references"] = round1(agg["references"] / len(pages))
    if agg["total_columns"]:
        agg["incompleteness_rate"] = round1(100 * agg["incomplete_columns"] / agg["total_columns"])
    return agg


def mapping():
    attrs = []
    ordered = ["rank", "name", "height", "prominence", "first_ascent", "ascents", "deaths", "death_rate", "year",
               "magnitude", "fatalities", "area", "depth", "volume", "period", "nationality", "without_oxygen",
               "duration", "gender", "new_route", "winter_ascent"]
    for canonical in ordered:
        if canonical == "name":
            aliases = {l: sorted({NAME_HEADERS[k][l] for k in NAME_HEADERS}) for l in LANGS}
        else:
            aliases = {l: [t] for l, t in HEADERS[canonical].items()}
        attrs.append({"canonical": canonical, "aliases": aliases})
    for kind in ("mountain", "quake", "lake"):
        key, labels = SERIES[kind]
        for year in range(1980, SERIES_LAST_YEAR + 1):
            attrs.append({"canonical": f"{key}_{year}", "aliases": {l: [f"{labels[l]} / {year}"] for l in LANGS}})
    return {"attributes": attrs}


def main():
    cache = ROOT / "fixtures" / "cache"
    if cache.exists():
        shutil.rmtree(cache)
    golden_pages = []
    for article in ARTICLES:
        en_title = article["titles"]["en"]
        others = [l for l in OTHER_LANGS][: article["versions"] - len(LANGS)]
        editions = [{"language": l, "title": article["titles"][l]} for l in LANGS]
        editions += [{"language": l, "title": en_title} for l in others]
        editions.sort(key=lambda e: e["language"])
        assert len(editions) == article["versions"]
        write_json(cache / "langlinks" / "en" / f"{encode(en_title)}.json", editions)

        for lang in LANGS:
            title = article["titles"][lang]
            html, main_index = page_html(article, lang)
            rev_id, rev_ts = revision(article["id"], lang)
            doc = {
                "article": {"language": lang, "title": title},
                "html": html,
                "revision_id": rev_id,
                "revision_timestamp": rev_ts,
                "fetched_at": FETCHED_AT,
            }
            write_json(cache / "pages" / lang / f"{encode(title)}.json", doc)
            n_tables, n_refs, n_cols, n_incomplete = article["pages"][lang]
            golden_pages.append({
                "family": article["id"], "language": lang, "title": title,
                "table_count": n_tables, "reference_count": n_refs, "main_table_index": main_index,
                "total_columns": n_cols, "complete_columns": n_cols - n_incomplete, "incomplete_columns": n_incomplete,
            })

    qids = {lang: {t: (f"Q{q}" if q is not None else None) for t, q in sorted(m.items())} for lang, m in QID_TITLES.items()}
    write_json(cache / "qids.json", qids)

    per_language = {l: aggregate([p for p in golden_pages if p["language"] == l]) for l in sorted(LANGS)}
    overall = aggregate(golden_pages)
    complete_rate = round1(100 * overall["complete_columns"] / overall["total_columns"])
    write_json(ROOT / "fixtures" / "golden" / "corpus_stats.json", {
        "per_language": per_language, "overall": overall, "complete_rate": complete_rate, "pages": golden_pages,
    })

    write_json(ROOT / "mappings" / "geography.json", mapping())
    families = [{"id": a["id"], "seed": {"language": "en", "title": a["titles"]["en"]}, "languages": LANGS} for a in ARTICLES]
    write_json(ROOT / "datasets" / "geography.json", {
        "settings": {"header_map": "../mappings/geography.json"}, "families": families,
    })
    write_json(ROOT / "datasets" / "climbers.json", {
        "settings": {"header_map": "../mappings/geography.json"},
        "families": [{
            "id": "eight_thousander_climbers", "seed": {"language": "en", "title": "Eight-thousander"},
            "languages": LANGS, "overrides": {"main_table_index": {l: 1 for l in LANGS}},
        }],
    })


if __name__ == "__main__":
    main()
