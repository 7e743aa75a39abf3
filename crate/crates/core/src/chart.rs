//! Deterministic charts of pages in the `(t - s, s)` plane: SVG, ASCII or JSON.
//!
//! Dots are instantiated from a page's orbit representatives by lattice
//! translation. Arrows are the differentials still to act on the page, drawn
//! from every source in the window.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mod_arith::HeightParams;
use crate::tate_engine::{
    dualize, run_to_einfty, DifferentialMap, Family, Group, MonomialClass, Page, PageRecord, SpectralSequence,
    TruncatedView,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Svg,
    Ascii,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svg" => Ok(Format::Svg),
            "ascii" | "txt" => Ok(Format::Ascii),
            "json" => Ok(Format::Json),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

/// Inclusive ranges of `t - s` and `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub stem_min: i64,
    pub stem_max: i64,
    pub s_min: i64,
    pub s_max: i64,
}

impl Window {
    pub fn new(stems: (i64, i64), filtrations: (i64, i64)) -> Self {
        Self {
            stem_min: stems.0,
            stem_max: stems.1,
            s_min: filtrations.0,
            s_max: filtrations.1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.stem_min > self.stem_max || self.s_min > self.s_max
    }

    pub fn contains(&self, class: &MonomialClass) -> bool {
        let (s, stem) = (class.s(), class.stem());
        (self.s_min..=self.s_max).contains(&s) && (self.stem_min..=self.stem_max).contains(&stem)
    }

    /// Two zero-line periods in each direction, with room for the short
    /// differentials above and below the zero line.
    pub fn default_for(family: Family) -> Self {
        let period = family.periodicity();
        let s = 2 * family.n() + 2;
        Self::new((-2 * period, 2 * period), (-s, s))
    }
}

impl FromStr for Window {
    type Err = Error;

    /// `STEM_MIN:STEM_MAX,S_MIN:S_MAX`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("window `{text}` is not STEM_MIN:STEM_MAX,S_MIN:S_MAX"));
        let range = |part: &str| -> Result<(i64, i64)> {
            let (a, b) = part.split_once(':').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        };
        let (stems, fil) = text.split_once(',').ok_or_else(bad)?;
        Ok(Self::new(range(stems)?, range(fil)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Style {
    /// Color of `d_(2n+1)`.
    pub short: String,
    /// Color of `d_(2n^2+1)`.
    pub long: String,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            short: "gray".into(),
            long: "blue".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub group: Group,
    pub p: u64,
    pub r: u32,
    /// Chart the Pontryagin-dual sequence instead.
    pub dual: bool,
    pub window: Window,
    pub format: Format,
    pub style: Style,
}

impl ChartSpec {
    pub fn new(group: Group, params: &HeightParams, r: u32, window: Window, format: Format) -> Self {
        Self {
            group,
            p: params.p(),
            r,
            dual: false,
            window,
            format,
            style: Style::default(),
        }
    }

    fn params(&self) -> Result<HeightParams> {
        HeightParams::new(self.p)
    }

    fn validate(&self) -> Result<()> {
        if self.r < 2 {
            return Err(Error::InvalidArgument(format!("page E_{} does not exist", self.r)));
        }
        self.params().map(|_| ())
    }

    fn sequence(&self) -> Result<SpectralSequence> {
        let ss = run_to_einfty(self.group, &self.params()?)?;
        if self.dual {
            dualize(&ss)
        } else {
            Ok(ss)
        }
    }
}

/// What marks each dot in an overlay.
pub enum Overlay<'a> {
    /// Plain rendering.
    Empty,
    /// Fates from the full sequence: dots reaching E-infinity are emphasized.
    Fates(&'a SpectralSequence),
    /// Survival in a truncated view; dots outside its half-plane are dropped.
    Truncated(&'a TruncatedView),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mark {
    Plain,
    Survives,
    Killed,
}

struct Dot {
    class: MonomialClass,
    mark: Mark,
}

struct Arrow {
    source: MonomialClass,
    target: MonomialClass,
    coeff: u32,
    r: u32,
}

struct Scene {
    family: Family,
    dots: Vec<Dot>,
    arrows: Vec<Arrow>,
}

fn build_scene(spec: &ChartSpec, page: &Page, diffs: &[&DifferentialMap], overlay: &Overlay<'_>) -> Scene {
    let w = spec.window;
    let mut dots = Vec::new();
    for class in page.classes_in_window((w.stem_min, w.stem_max), (w.s_min, w.s_max)) {
        let mark = match overlay {
            Overlay::Empty => Mark::Plain,
            Overlay::Fates(ss) => match ss.fate(&class) {
                Some(f) if f.killed_at().is_none() => Mark::Survives,
                _ => Mark::Killed,
            },
            Overlay::Truncated(view) => {
                if !view.contains_s(class.s()) {
                    continue;
                }
                if view.survives(&class) {
                    Mark::Survives
                } else {
                    Mark::Killed
                }
            }
        };
        dots.push(Dot { class, mark });
    }
    let mut arrows = Vec::new();
    if !matches!(overlay, Overlay::Truncated(_)) {
        for d in diffs {
            for dot in &dots {
                if let Some((target, coeff)) = d.apply(&dot.class) {
                    arrows.push(Arrow {
                        source: dot.class,
                        target,
                        coeff,
                        r: d.r(),
                    });
                }
            }
        }
    } else if let Overlay::Truncated(view) = overlay {
        let p = spec.p as i64;
        for dot in &dots {
            for (s, t, c, r) in view.differentials() {
                let reduced = MonomialClass {
                    j: dot.class.j.rem_euclid(p),
                    ..dot.class
                };
                if *s == reduced {
                    let dj = dot.class.j - reduced.j;
                    arrows.push(Arrow {
                        source: dot.class,
                        target: t.translate(0, dj),
                        coeff: *c,
                        r: *r,
                    });
                }
            }
        }
    }
    arrows.sort_by_key(|a| (a.r, a.source.s(), a.source.stem(), a.source));
    Scene {
        family: page.family(),
        dots,
        arrows,
    }
}

/// Renders `spec` as a string in the requested format.
pub fn render(spec: &ChartSpec) -> Result<String> {
    diff_overlay(spec, &Overlay::Empty)
}

/// Renders with each dot marked by its fate. An empty overlay is a plain render.
pub fn diff_overlay(spec: &ChartSpec, overlay: &Overlay<'_>) -> Result<String> {
    spec.validate()?;
    let ss = spec.sequence()?;
    let page = ss.page_at(spec.r);
    let diffs = ss.differentials_from(spec.r);
    if spec.format == Format::Json {
        return render_json(spec, &page, &diffs);
    }
    let scene = build_scene(spec, &page, &diffs, overlay);
    Ok(match spec.format {
        Format::Ascii => render_ascii(spec, &scene, overlay),
        Format::Svg => render_svg(spec, &scene),
        Format::Json => unreachable!(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartDocument {
    pub spec: ChartSpec,
    pub page: PageRecord,
}

fn render_json(spec: &ChartSpec, page: &Page, diffs: &[&DifferentialMap]) -> Result<String> {
    let doc = ChartDocument {
        spec: spec.clone(),
        page: page.record(diffs),
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Parses a JSON chart, validating the page against the engine.
pub fn parse_json(text: &str) -> Result<(ChartSpec, Page, Vec<DifferentialMap>)> {
    let doc: ChartDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let (page, maps) = Page::from_record(&doc.page)?;
    if page.family().group != doc.spec.group || page.family().p != doc.spec.p || page.r() != doc.spec.r {
        return Err(Error::Parse("chart spec and page disagree".into()));
    }
    Ok((doc.spec, page, maps))
}

/// Re-renders a parsed JSON chart.
pub fn render_parsed(spec: &ChartSpec, page: &Page, maps: &[DifferentialMap]) -> Result<String> {
    let refs: Vec<&DifferentialMap> = maps.iter().collect();
    render_json(spec, page, &refs)
}

fn family_note(family: Family) -> String {
    format!(
        "d_{} = short, d_{} = long",
        family.short_page(),
        family.long_page()
    )
}

fn render_ascii(spec: &ChartSpec, scene: &Scene, overlay: &Overlay<'_>) -> String {
    let w = spec.window;
    let mut out = String::new();
    let _ = writeln!(out, "# tateshift chart");
    let _ = writeln!(
        out,
        "# group={} p={} r={} dual={}",
        spec.group, spec.p, spec.r, spec.dual
    );
    let _ = writeln!(
        out,
        "# window: t-s in [{}, {}], s in [{}, {}]",
        w.stem_min, w.stem_max, w.s_min, w.s_max
    );
    match overlay {
        Overlay::Empty => {
            let _ = writeln!(out, "# legend: * class, # several classes, . empty, - s=0, | t-s=0");
        }
        _ => {
            let _ = writeln!(
                out,
                "# legend: o survivor, x killed, O/X several, . empty, - s=0, | t-s=0"
            );
        }
    }
    let _ = writeln!(out, "# {}", family_note(scene.family));
    if w.is_empty() {
        let _ = writeln!(out, "# empty window");
        return out;
    }
    let mut cells: BTreeMap<(i64, i64), Vec<Mark>> = BTreeMap::new();
    for dot in &scene.dots {
        cells.entry((dot.class.s(), dot.class.stem())).or_default().push(dot.mark);
    }
    for s in (w.s_min..=w.s_max).rev() {
        let _ = write!(out, "{s:>5} ");
        for stem in w.stem_min..=w.stem_max {
            let c = match cells.get(&(s, stem)) {
                Some(marks) => {
                    let several = marks.len() > 1;
                    match (marks.contains(&Mark::Survives), marks[0], several) {
                        (_, Mark::Plain, false) => '*',
                        (_, Mark::Plain, true) => '#',
                        (true, _, false) => 'o',
                        (true, _, true) => 'O',
                        (false, _, false) => 'x',
                        (false, _, true) => 'X',
                    }
                }
                None if s == 0 && stem == 0 => '+',
                None if s == 0 => '-',
                None if stem == 0 => '|',
                None => '.',
            };
            out.push(c);
        }
        out.push('\n');
    }
    // stem ruler: a tick every 10
    let _ = write!(out, "{:>5} ", "t-s");
    for stem in w.stem_min..=w.stem_max {
        out.push(if stem.rem_euclid(10) == 0 { '^' } else { ' ' });
    }
    out.push('\n');
    let ticks: Vec<String> = (w.stem_min..=w.stem_max)
        .filter(|x| x.rem_euclid(10) == 0)
        .map(|x| x.to_string())
        .collect();
    let _ = writeln!(out, "# ticks at t-s = {}", ticks.join(" "));
    let _ = writeln!(out, "# classes: {}", scene.dots.len());
    for dot in &scene.dots {
        let mark = match dot.mark {
            Mark::Plain => "",
            Mark::Survives => " [survives]",
            Mark::Killed => " [killed]",
        };
        let _ = writeln!(
            out,
            "#   ({}, {}) {}{}",
            dot.class.stem(),
            dot.class.s(),
            dot.class.label(),
            mark
        );
    }
    let _ = writeln!(out, "# differentials: {}", scene.arrows.len());
    for a in &scene.arrows {
        let _ = writeln!(
            out,
            "#   d_{}: {} -> {}{}",
            a.r,
            a.source.label(),
            if a.coeff == 1 { String::new() } else { format!("{} ", a.coeff) },
            a.target.label()
        );
    }
    out
}

const CELL: i64 = 14;
const MARGIN: i64 = 40;

fn render_svg(spec: &ChartSpec, scene: &Scene) -> String {
    let w = spec.window;
    let cols = (w.stem_max - w.stem_min + 1).max(0);
    let rows = (w.s_max - w.s_min + 1).max(0);
    let width = 2 * MARGIN + cols * CELL;
    let height = 2 * MARGIN + rows * CELL;
    let x = |stem: i64| MARGIN + (stem - w.stem_min) * CELL + CELL / 2;
    let y = |s: i64| MARGIN + (w.s_max - s) * CELL + CELL / 2;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="16" font-family="monospace" font-size="12">{} p={} E_{}{}</text>"#,
        spec.group,
        spec.p,
        spec.r,
        if spec.dual { " (dual)" } else { "" }
    );
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black" stroke-width="0.5"/>"#,
        cols * CELL,
        rows * CELL
    );
    if !w.is_empty() {
        if (w.s_min..=w.s_max).contains(&0) {
            let _ = writeln!(
                out,
                r#"<line x1="{MARGIN}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="0.5" stroke-dasharray="2,2"/>"#,
                y(0),
                MARGIN + cols * CELL,
                y(0)
            );
        }
        if (w.stem_min..=w.stem_max).contains(&0) {
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{MARGIN}" x2="{}" y2="{}" stroke="black" stroke-width="0.5" stroke-dasharray="2,2"/>"#,
                x(0),
                x(0),
                MARGIN + rows * CELL
            );
        }
        for stem in (w.stem_min..=w.stem_max).filter(|v| v.rem_euclid(10) == 0) {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-family="monospace" font-size="9" text-anchor="middle">{stem}</text>"#,
                x(stem),
                MARGIN + rows * CELL + 14
            );
        }
        for s in (w.s_min..=w.s_max).filter(|v| v.rem_euclid(5) == 0) {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-family="monospace" font-size="9" text-anchor="end">{s}</text>"#,
                MARGIN - 4,
                y(s) + 3
            );
        }
    }
    let short = scene.family.short_page();
    for a in &scene.arrows {
        let color = if a.r == short { &spec.style.short } else { &spec.style.long };
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="1"/>"#,
            x(a.source.stem()),
            y(a.source.s()),
            x(a.target.stem()),
            y(a.target.s())
        );
    }
    // several classes in one cell sit side by side
    let mut per_cell: BTreeMap<(i64, i64), Vec<&Dot>> = BTreeMap::new();
    for dot in &scene.dots {
        per_cell.entry((dot.class.stem(), dot.class.s())).or_default().push(dot);
    }
    for ((stem, s), dots) in per_cell {
        let m = dots.len() as i64;
        for (k, dot) in dots.iter().enumerate() {
            let cx = x(stem) + 4 * (2 * k as i64 - (m - 1)) / 2;
            let cy = y(s);
            let title = dot.class.label();
            match dot.mark {
                Mark::Plain => {
                    let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="black"><title>{title}</title></circle>"#);
                }
                Mark::Survives => {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{cx}" cy="{cy}" r="4" fill="black" stroke="red" stroke-width="1.5"><title>{title}</title></circle>"#
                    );
                }
                Mark::Killed => {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{cx}" cy="{cy}" r="3" fill="none" stroke="gray"><title>{title}</title></circle>"#
                    );
                    let _ = writeln!(
                        out,
                        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-width="1"/>"#,
                        cx - 4,
                        cy + 4,
                        cx + 4,
                        cy - 4
                    );
                }
            }
        }
    }
    let _ = writeln!(out, "</svg>");
    out
}
