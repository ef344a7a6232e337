#!/usr/bin/env python3
"""Generate the wunderground composite-memento fixture store used by the
CLI acceptance tests. Run from the repository root."""

import datetime as dt
import json
import os
import shutil
import urllib.parse

OUT = "crates/cli/tests/fixtures/wunderground"
ARCHIVE = "http://archive.example"

ROOT_URI = "http://www.wunderground.com/cgi-bin/findweather/getForecast?query=50593"
ROOT_WHEN = "2004-12-09 19:29:26"


def parse(when):
    return dt.datetime.strptime(when, "%Y-%m-%d %H:%M:%S").replace(tzinfo=dt.timezone.utc)


def rfc1123(when):
    return parse(when).strftime("%a, %d %b %Y %H:%M:%S GMT")


def stamp(when):
    return parse(when).strftime("%Y%m%d%H%M%S")


def enc(uri):
    return urllib.parse.quote(uri, safe="._-")


# (uri_r, capture datetime, last-modified or None, content type, headers?)
# headers=False simulates a memento listed in the timemap whose fetch fails.
EMBEDDED = [
    ("http://ads.wunderground.com/ads/images/wu-9.jpg",
     "2004-10-16 03:40:53", None, "image/jpeg", True),
    ("http://icons.wunderground.com/graphics/smalllogo2.gif",
     "2004-11-22 05:46:03", "2004-08-01 00:00:00", "image/gif", True),
    ("http://ads.wunderground.com/ads/images/Statefarm-sfcom001_120x30.gif",
     "2004-11-22 05:46:32", None, "image/gif", True),
    ("http://icons.wunderground.com/ads/images/Davi-00009-vp2_125x125.gif",
     "2004-12-08 07:01:08", "2004-11-15 09:30:00", "image/gif", True),
    ("http://icons.wunderground.com/graphics/smash/wunderTransparent.gif",
     "2004-12-09 04:36:14", "2003-06-20 14:00:00", "image/gif", True),
    ("http://icons.wunderground.com/graphics/conds/cloudy.GIF",
     "2004-12-10 04:48:55", "2000-04-13 20:55:00", "image/gif", True),
    ("http://icons.wunderground.com/graphics/conds/mostlycloudy.GIF",
     "2004-12-10 04:48:55", "2000-04-13 20:55:00", "image/gif", True),
    ("http://icons.wunderground.com/graphics/conds/rait.GIF",
     "2004-12-12 14:54:01", "2000-04-13 20:55:00", "image/gif", True),
    ("http://icons.wunderground.com/ads/images/TripAdvisor-Blinky.gif",
     "2005-01-27 02:58:30", "2004-12-01 12:00:00", "image/gif", True),
    ("http://banners.wunderground.com/cgi-bin/statefarmbanner?zip=50593&width=150",
     "2006-03-26 03:29:00", None, "image/gif", True),
    ("http://www.valueclick.com/system/files/coupon-mountain-slider.png?1310511429",
     "2011-07-13 09:08:00", "2011-07-12 23:50:21", "image/png", True),
    ("http://z1.adserver.com/system/files/logo.gif",
     "2013-01-13 06:09:14", None, "image/gif", True),
    # Missing memento: listed but unretrievable.
    ("http://pagead2.googlesyndication.com/pagead/show_ads.js",
     "2004-12-10 02:00:00", None, "application/javascript", False),
]

# Not archived at all: referenced by the page, no fixture directory.
NOT_ARCHIVED = "http://icons.wunderground.com/data/wximagenew/d/d70dave/0-thumb.jpg"


def replay(uri_r, when, mode=""):
    return f"{ARCHIVE}/web/{stamp(when)}{mode}/{uri_r}"


def write(path, content):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    mode = "wb" if isinstance(content, bytes) else "w"
    with open(path, mode) as fh:
        fh.write(content)


def headers_block(when, last_modified, content_type):
    lines = ["HTTP/1.1 200 OK",
             f"Memento-Datetime: {rfc1123(when)}",
             f"X-Archive-Orig-Date: {rfc1123(when)}"]
    if last_modified is not None:
        lines.append(f"X-Archive-Orig-Last-Modified: {rfc1123(last_modified)}")
    lines.append(f"Content-Type: {content_type}")
    return "\n".join(lines) + "\n"


def timemap_json(uri_r, mementos):
    return json.dumps(
        {"uri_r": uri_r,
         "mementos": [{"uri_m": m, "datetime": rfc1123(w)} for (m, w) in mementos]},
        indent=2) + "\n"


def root_body():
    # The replayed page mixes rewriting styles: absolute replay URLs,
    # path-absolute replay URLs, and raw original URLs.
    rs = stamp(ROOT_WHEN)
    refs = []
    for i, (uri_r, _, _, _, _) in enumerate(EMBEDDED[:-1]):
        if i % 3 == 0:
            refs.append(f"{ARCHIVE}/web/{rs}im_/{uri_r}")
        elif i % 3 == 1:
            refs.append(f"/web/{rs}im_/{uri_r}")
        else:
            refs.append(uri_r)
    imgs = "\n".join(
        f'    <img src="{r.replace("&", "&amp;")}" alt="embedded {i}">'
        for i, r in enumerate(refs))
    script_uri = EMBEDDED[-1][0]
    return f"""<html>
<head>
<title>Des Moines, Iowa Forecast</title>
<script src="/web/{rs}js_/{script_uri}" type="text/javascript"></script>
</head>
<body background="{NOT_ARCHIVED}">
  <h1>Current conditions</h1>
  <div>
{imgs}
  </div>
  <a href="/web/{rs}/http://www.wunderground.com/US/IA/">Iowa index</a>
  <img src="data:image/gif;base64,R0lGODlhAQABAAAAACw=" alt="spacer">
</body>
</html>
"""


def main():
    shutil.rmtree(OUT, ignore_errors=True)

    # Root resource.
    root_dir = os.path.join(OUT, enc(ROOT_URI))
    root_m = replay(ROOT_URI, ROOT_WHEN)
    write(os.path.join(root_dir, "timemap.json"),
          timemap_json(ROOT_URI, [(root_m, ROOT_WHEN)]))
    write(os.path.join(root_dir, f"{stamp(ROOT_WHEN)}.headers"),
          headers_block(ROOT_WHEN, None, "text/html"))
    write(os.path.join(root_dir, f"{stamp(ROOT_WHEN)}.body"), root_body())

    for (uri_r, when, lm, ctype, retrievable) in EMBEDDED:
        d = os.path.join(OUT, enc(uri_r))
        write(os.path.join(d, "timemap.json"),
              timemap_json(uri_r, [(replay(uri_r, when), when)]))
        if retrievable:
            write(os.path.join(d, f"{stamp(when)}.headers"),
                  headers_block(when, lm, ctype))

    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
