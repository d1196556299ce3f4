//! Minimal magnitude plot: axes, a dB grid and two traces.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub values: &'a [f64],
}

fn nice_step(span: f64, target_ticks: f64) -> f64 {
    let raw = span / target_ticks;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

/// Renders dB traces against frequency in GHz. Values below the axis floor
/// are clipped to it.
pub fn magnitude_plot(title: &str, freqs_hz: &[f64], series: &[Series<'_>]) -> String {
    let fx0 = freqs_hz.first().copied().unwrap_or(0.0) / 1e9;
    let fx1 = freqs_hz.last().copied().unwrap_or(1.0) / 1e9;
    let fx1 = if fx1 > fx0 { fx1 } else { fx0 + 1.0 };

    let lowest = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0_f64, f64::min);
    let y0 = ((lowest / 10.0).floor() * 10.0).clamp(-120.0, -10.0);
    let y1 = 0.0;
    let ystep = if y1 - y0 > 60.0 { 20.0 } else { 10.0 };

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |f: f64| LEFT + (f - fx0) / (fx1 - fx0) * pw;
    let py = |db: f64| TOP + (y1 - db.clamp(y0, y1)) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let mut db = y0;
    while db <= y1 + 1e-9 {
        let y = py(db);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.1}" y1="{y:.2}" x2="{:.1}" y2="{y:.2}" stroke="#ddd"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{db:.0}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
        db += ystep;
    }

    let xstep = nice_step(fx1 - fx0, 8.0);
    let mut f = (fx0 / xstep).ceil() * xstep;
    while f <= fx1 + 1e-9 * xstep {
        let x = px(f);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP:.1}" x2="{x:.2}" y2="{:.1}" stroke="#eee"/>"##,
            TOP + ph
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            TOP + ph + 18.0,
            trim_number(f)
        );
        f += xstep;
    }

    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.1}" y="{TOP:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">Frequency (GHz)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">Magnitude (dB)</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (k, ser) in series.iter().enumerate() {
        let pts: Vec<String> = freqs_hz
            .iter()
            .zip(ser.values)
            .filter(|(_, v)| !v.is_nan())
            .map(|(&f, &v)| format!("{:.2},{:.2}", px(f / 1e9), py(v)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            ser.color,
            pts.join(" ")
        );
        let ly = TOP + 16.0 + 18.0 * k as f64;
        let lx = LEFT + pw - 150.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2"/>"#,
            lx + 24.0,
            ser.color
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn trim_number(v: f64) -> String {
    let t = format!("{v:.3}");
    t.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
