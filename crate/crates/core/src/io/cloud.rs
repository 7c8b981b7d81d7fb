use std::fmt::Write;

use nalgebra::Vector3;

use super::ParseError;
use crate::collision::{CloudPoint, PointCloud};

/// Parse the ASCII cloud format.
///
/// One point per line as `x y z` or `x y z vx vy vz`. Blank lines and lines
/// starting with `#` are ignored. Before the first point, `count N` declares
/// the number of points and `origin x y z` sets the sensor position.
pub fn parse_cloud(text: &str) -> Result<PointCloud, ParseError> {
    let mut cloud = PointCloud::default();
    let mut declared: Option<(usize, usize)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: String| ParseError { line: line_no, msg };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let head = fields.next().unwrap_or_default();
        if head == "count" || head == "origin" {
            if !cloud.points.is_empty() {
                return Err(err(format!("'{head}' must precede the points")));
            }
            let rest: Vec<&str> = fields.collect();
            if head == "count" {
                let [n] = rest[..] else {
                    return Err(err("expected 'count N'".into()));
                };
                let n = n
                    .parse::<usize>()
                    .map_err(|e| err(format!("bad count '{n}': {e}")))?;
                declared = Some((n, line_no));
            } else {
                let v = numbers(&rest).map_err(err)?;
                let [x, y, z] = v[..] else {
                    return Err(err("expected 'origin x y z'".into()));
                };
                cloud.origin = Vector3::new(x, y, z);
            }
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let v = numbers(&tokens).map_err(err)?;
        let point = match v[..] {
            [x, y, z] => CloudPoint::fixed(Vector3::new(x, y, z)),
            [x, y, z, vx, vy, vz] => {
                CloudPoint::moving(Vector3::new(x, y, z), Vector3::new(vx, vy, vz))
            }
            _ => return Err(err(format!("expected 3 or 6 values, found {}", v.len()))),
        };
        cloud.points.push(point);
    }
    if let Some((n, line)) = declared {
        if n != cloud.points.len() {
            return Err(ParseError {
                line,
                msg: format!("count says {n} points, file has {}", cloud.points.len()),
            });
        }
    }
    Ok(cloud)
}

fn numbers(tokens: &[&str]) -> Result<Vec<f64>, String> {
    tokens
        .iter()
        .map(|t| match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            Ok(_) => Err(format!("non-finite value '{t}'")),
            Err(_) => Err(format!("not a number: '{t}'")),
        })
        .collect()
}

/// Write a cloud so that [`parse_cloud`] reads back identical values.
pub fn write_cloud(cloud: &PointCloud) -> String {
    let mut out = String::with_capacity(32 * cloud.len() + 64);
    let o = cloud.origin;
    let _ = writeln!(out, "count {}", cloud.len());
    let _ = writeln!(out, "origin {} {} {}", o.x, o.y, o.z);
    for pt in &cloud.points {
        let p = pt.p;
        if pt.is_static() {
            let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
        } else {
            let v = pt.v;
            let _ = writeln!(out, "{} {} {} {} {} {}", p.x, p.y, p.z, v.x, v.y, v.z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_comments_header_and_velocities() {
        let text = "# scan\ncount 2\norigin 1 2 3\n0 0 0\n\n1.5 -2 3 0.1 0 -1\n";
        let c = parse_cloud(text).unwrap();
        assert_eq!(c.origin, Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(c.points[0], CloudPoint::fixed(Vector3::zeros()));
        assert_eq!(c.points[1].v, Vector3::new(0.1, 0.0, -1.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_cloud("# a\n1 2 3\n1 2\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_cloud("1 2 nan\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(e.msg.contains("non-finite"));
        let e = parse_cloud("count 3\n1 2 3\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse_cloud("1 2 3\ncount 1\n").is_err());
        assert!(parse_cloud("1 2 x\n")
            .unwrap_err()
            .msg
            .contains("not a number"));
    }

    proptest! {
        #[test]
        fn round_trip(pts in prop::collection::vec(
            (any::<(f64, f64, f64)>(), prop::option::of((-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64))), 0..30),
            origin in (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64)) {
            let points: Vec<_> = pts.iter().filter(|(p, _)| p.0.is_finite() && p.1.is_finite() && p.2.is_finite()).map(|(p, v)| {
                let p = Vector3::new(p.0, p.1, p.2);
                match v {
                    Some(v) => CloudPoint::moving(p, Vector3::new(v.0, v.1, v.2)),
                    None => CloudPoint::fixed(p),
                }
            }).collect();
            let cloud = PointCloud::new(points, Vector3::new(origin.0, origin.1, origin.2));
            let back = parse_cloud(&write_cloud(&cloud)).unwrap();
            prop_assert_eq!(back, cloud);
        }
    }
}
