"""Reference data for the three public phishing benchmarks.

Column names in the distributed files are long (``having_IP_Address``); the
short forms used throughout reports (``IPAddress``) are mapped here, along
with feature classes, label conventions, reference FRS reducts and the
UCI1 <-> Mendeley alias table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .dataset import AliasMap, Dataset, load
from dataclasses import replace

UCI1_COLUMNS = {
    "having_IP_Address": ("IPAddress", 1),
    "URL_Length": ("UrlLen", 1),
    "Shortining_Service": ("ShortService", 1),
    "having_At_Symbol": ("AtSymbol", 1),
    "double_slash_redirecting": ("DoubleSlash", 1),
    "Prefix_Suffix": ("PrefSuff", 1),
    "having_Sub_Domain": ("HaveSubDomain", 1),
    "SSLfinal_State": ("SSLfinalSt", 1),
    "Domain_registeration_length": ("DomainRegLen", 1),
    "Favicon": ("Favicon", 1),
    "port": ("Port", 1),
    "HTTPS_token": ("HTTPSToken", 1),
    "Request_URL": ("ReqUrl", 2),
    "URL_of_Anchor": ("UrlAnchor", 2),
    "Links_in_tags": ("LinksInTags", 2),
    "SFH": ("SFH", 2),
    "Submitting_to_email": ("Submit2Email", 2),
    "Abnormal_URL": ("AbnormalUrl", 2),
    "Redirect": ("Redirect", 3),
    "on_mouseover": ("OnMouseOver", 3),
    "RightClick": ("RightClick", 3),
    "popUpWidnow": ("PopUpWin", 3),
    "Iframe": ("Iframe", 3),
    "age_of_domain": ("AgeOfDomain", 4),
    "DNSRecord": ("DNSRecord", 4),
    "web_traffic": ("WebTraffic", 4),
    "Page_Rank": ("PageRank", 4),
    "Google_Index": ("GoogleIndx", 4),
    "Links_pointing_to_page": ("LinksToPage", 4),
    "Statistical_report": ("StatisticalReport", 4),
}

UCI2_COLUMNS = {
    "SFH": ("SFH", 2),
    "popUpWidnow": ("PopUpWin", 3),
    "SSLfinal_State": ("SSLfinalSt", 1),
    "Request_URL": ("ReqUrl", 2),
    "URL_of_Anchor": ("UrlAnchor", 2),
    "web_traffic": ("WebTraffic", 4),
    "URL_Length": ("UrlLen", 1),
    "age_of_domain": ("AgeOfDomain", 4),
    "having_IP_Address": ("IPAddress", 1),
}

MENDELEY_COLUMNS = {
    "NumDots": ("NumDots", 1),
    "SubdomainLevel": ("SubDomainLevl", 1),
    "PathLevel": ("PathLevl", 1),
    "UrlLength": ("UrlLen", 1),
    "NumDash": ("NumDash", 1),
    "NumDashInHostname": ("NumDashInHostname", 1),
    "AtSymbol": ("AtSymbol", 1),
    "TildeSymbol": ("TildeSymbol", 1),
    "NumUnderscore": ("NumUnderscore", 1),
    "NumPercent": ("NumPercent", 1),
    "NumQueryComponents": ("NumQueryComp", 1),
    "NumAmpersand": ("NumAmpersand", 1),
    "NumHash": ("NumHash", 1),
    "NumNumericChars": ("NumNumcChars", 1),
    "NoHttps": ("NoHttps", 1),
    "RandomString": ("RandString", 1),
    "IpAddress": ("IpAddress", 1),
    "DomainInSubdomains": ("DomainInSubdomains", 1),
    "DomainInPaths": ("DomainInPaths", 1),
    "HttpsInHostname": ("HttpsInHostname", 1),
    "HostnameLength": ("HostnameLen", 1),
    "PathLength": ("PathLen", 1),
    "QueryLength": ("QueryLen", 1),
    "DoubleSlashInPath": ("DoubleSlashInPath", 1),
    "NumSensitiveWords": ("NumSensitiveWords", 1),
    "EmbeddedBrandName": ("EmbeddedBrandName", 1),
    "PctExtHyperlinks": ("PctExtHlinks", 2),
    "PctExtResourceUrls": ("PctExtResUrls", 2),
    "ExtFavicon": ("ExtFavicon", 1),
    "InsecureForms": ("InsecureForms", 2),
    "RelativeFormAction": ("RelativeFormAction", 2),
    "ExtFormAction": ("ExtFormAct", 2),
    "AbnormalFormAction": ("AbnormFormAct", 2),
    "PctNullSelfRedirectHyperlinks": ("PctNullSelfRedirHlinks", 2),
    "FrequentDomainNameMismatch": ("FreqDomainNameMismatch", 3),
    "FakeLinkInStatusBar": ("FakeLinkInStatusBar", 3),
    "RightClickDisabled": ("RightClickDisabled", 3),
    "PopUpWindow": ("PopUpWin", 3),
    "SubmitInfoToEmail": ("Submit2Email", 2),
    "IframeOrFrame": ("IframeOrFrame", 3),
    "MissingTitle": ("MissingTitle", 3),
    "ImagesOnlyInForm": ("ImagesOnlyInForm", 3),
    "SubdomainLevelRT": ("SubDomainLevlRT", 1),
    "UrlLengthRT": ("UrlLenRT", 1),
    "PctExtResourceUrlsRT": ("PctExtResUrlsRT", 3),
    "AbnormalExtFormActionR": ("AbnormExtFormActR", 3),
    "ExtMetaScriptLinkRT": ("ExtMetaScriptLinkRT", 3),
    "PctExtNullSelfRedirectHyperlinksRT": ("PctExtNullSelfRedirHlinksRT", 3),
}

# Reference FRS selections, in listed order.
REFERENCE_REDUCTS = {
    "uci1": (
        "IPAddress", "UrlLen", "ShortService", "AtSymbol", "PrefSuff", "HaveSubDomain",
        "SSLfinalSt", "DomainRegLen", "Favicon", "HTTPSToken", "ReqUrl", "UrlAnchor",
        "LinksInTags", "SFH", "Submit2Email", "Redirect", "PopUpWin", "AgeOfDomain",
        "DNSRecord", "WebTraffic", "PageRank", "GoogleIndx", "LinksToPage",
        "StatisticalReport",
    ),
    "mendeley": (
        "NumDots", "SubDomainLevl", "PathLevl", "UrlLen", "NumDash", "NumUnderscore",
        "NumQueryComp", "NumNumcChars", "RandString", "DomainInPaths", "HostnameLen",
        "PathLen", "DoubleSlashInPath", "ExtFavicon", "PctExtResUrls", "PctExtHlinks",
        "InsecureForms", "RelativeFormAction", "PctNullSelfRedirHlinks", "Submit2Email",
        "FreqDomainNameMismatch", "IframeOrFrame", "MissingTitle", "PctExtResUrlsRT",
        "AbnormExtFormActR", "ExtMetaScriptLinkRT", "PctExtNullSelfRedirHlinksRT",
    ),
    "uci2": (
        "IPAddress", "UrlLen", "SSLfinalSt", "ReqUrl", "UrlAnchor", "SFH", "PopUpWin",
        "WebTraffic", "AgeOfDomain",
    ),
}

# Reference selection sizes; the Mendeley list above has 27 names.
REFERENCE_SIZES = {"uci1": 24, "mendeley": 30, "uci2": 9}

UNIVERSAL_FEATURES = (
    "UrlLen", "PrefSuff", "HaveSubDomain", "Favicon", "ReqUrl", "UrlAnchor",
    "LinksInTags", "SFH", "Submit2Email",
)


def default_aliases() -> AliasMap:
    """UCI1 short names (canonical) against the Mendeley features sharing them."""
    ref = resources.files("frsfs") / "data" / "uci1_mendeley_aliases.csv"
    with resources.as_file(ref) as path:
        return AliasMap.from_csv(path)


@dataclass(frozen=True)
class Preset:
    key: str
    label_column: str
    positive: str
    columns: dict = field(repr=False)
    suspicious: str | None = None
    negative: str | None = None
    drop_columns: tuple[str, ...] = ()
    filenames: tuple[str, ...] = ()


PRESETS = {
    "uci1": Preset("uci1", "Result", "-1", UCI1_COLUMNS, negative="1",
                   filenames=("uci1.arff", "Training Dataset.arff", "uci1.csv")),
    "uci2": Preset("uci2", "Result", "-1", UCI2_COLUMNS, suspicious="0", negative="1",
                   filenames=("uci2.arff", "PhishingData.arff", "uci2.csv")),
    "mendeley": Preset("mendeley", "CLASS_LABEL", "1", MENDELEY_COLUMNS, negative="0",
                       drop_columns=("id",),
                       filenames=("mendeley.csv", "Phishing_Legitimate_full.csv",
                                  "Phishing_Legitimate_full.arff")),
}


def apply_preset(ds: Dataset, preset: Preset) -> Dataset:
    """Rename raw columns to short names and attach feature classes."""
    feats = []
    for f in ds.features:
        short, cls = preset.columns.get(f.name, (f.name, None))
        feats.append(replace(f, name=short, feature_class=cls))
    return replace(ds, name=preset.key, features=tuple(feats))


def load_benchmark(path, key: str) -> Dataset:
    preset = PRESETS[key]
    ds = load(path, preset.label_column, drop_columns=preset.drop_columns)
    return apply_preset(ds, preset)


def find_benchmark(directory, key: str):
    """Path of the benchmark file inside ``directory``, or None."""
    from pathlib import Path

    if directory is None:
        return None
    for fname in PRESETS[key].filenames:
        p = Path(directory) / fname
        if p.exists():
            return p
    return None
