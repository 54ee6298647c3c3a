//! SVG sketches: 1-D covers, and slices `w = w0` of 2-D covers.

use std::fmt::Write as _;

use crate::cartan::{Car1Cover, Car20Cover};
use crate::poly::C64;

const SIZE: f64 = 480.0;

fn header(out: &mut String, title: &str) {
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct View {
    center: C64,
    half: f64,
}

impl View {
    fn x(&self, z: C64) -> f64 {
        (z.re - self.center.re + self.half) / (2.0 * self.half) * SIZE
    }

    fn y(&self, z: C64) -> f64 {
        (self.center.im + self.half - z.im) / (2.0 * self.half) * SIZE
    }

    fn len(&self, r: f64) -> f64 {
        r / (2.0 * self.half) * SIZE
    }
}

fn circle(out: &mut String, v: &View, c: C64, r: f64, style: &str) {
    let _ = writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" {style}/>"#, v.x(c), v.y(c), v.len(r).max(0.5));
}

/// Disks of a 1-D cover and the given zeros inside the domain `D(center, half)`.
pub fn cover1d_svg(cover: &Car1Cover, zeros: &[C64], center: C64, half: f64) -> String {
    let v = View { center, half };
    let mut out = String::new();
    header(&mut out, &format!("Cartan cover, H = {}", cover.h));
    circle(&mut out, &v, center, half, r##"fill="none" stroke="#999999""##);
    for d in &cover.disks {
        circle(&mut out, &v, d.center, d.radius, r##"fill="#4a90d9" fill-opacity="0.35" stroke="#1f4e79""##);
    }
    for z in zeros {
        circle(&mut out, &v, *z, 0.0, r##"fill="#c0392b""##);
    }
    out.push_str("</svg>\n");
    out
}

/// Sections of the balls of a 2-D cover by the complex line `w = w0`,
/// drawn in the `z`-plane over `D(0, 1/4)`.
pub fn cover2d_slice_svg(cover: &Car20Cover, w0: C64) -> String {
    let v = View { center: C64::new(0.0, 0.0), half: 0.25 };
    let mut out = String::new();
    header(&mut out, &format!("cover slice at w = {w0}"));
    circle(&mut out, &v, C64::new(0.0, 0.0), 0.25, r##"fill="none" stroke="#999999""##);
    for b in &cover.balls {
        let dw = (b.center[1] - w0).norm();
        if dw < b.radius {
            let r = (b.radius * b.radius - dw * dw).sqrt();
            circle(&mut out, &v, b.center[0], r, r##"fill="#4a90d9" fill-opacity="0.35" stroke="#1f4e79""##);
        }
    }
    out.push_str("</svg>\n");
    out
}
