use std::str::FromStr;

use jouanolou::{Complex3, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Chunk {
    pub index: u32,
    pub count: u32,
}

impl FromStr for Chunk {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (i, n) = s.split_once('/').ok_or("expected i/n")?;
        let index: u32 = i.trim().parse().map_err(|_| "bad chunk index")?;
        let count: u32 = n.trim().parse().map_err(|_| "bad chunk count")?;
        if count == 0 || index >= count {
            return Err(format!("chunk {index}/{count} out of range"));
        }
        Ok(Chunk { index, count })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub width: usize,
    pub height: usize,
}

impl FromStr for Resolution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
        let width: usize = w.trim().parse().map_err(|_| "bad width")?;
        let height: usize = h.trim().parse().map_err(|_| "bad height")?;
        if width < 16 || height < 16 {
            return Err("resolution must be at least 16x16".into());
        }
        Ok(Resolution { width, height })
    }
}

/// Parses `3`, `-2.5i`, `1+2i`, `0.5-1e-3i`, `i`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number {s:?}");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = if re.is_empty() {
        0.0
    } else {
        re.parse::<f64>().map_err(|_| bad())?
    };
    Ok(C64::new(re, im))
}

pub fn parse_point(s: &str) -> Result<Complex3, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated coordinates, got {s:?}"));
    }
    Ok(Complex3::new(
        parse_complex(parts[0])?,
        parse_complex(parts[1])?,
        parse_complex(parts[2])?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("3").unwrap(), C64::new(3.0, 0.0));
        assert_eq!(parse_complex("-2.5i").unwrap(), C64::new(0.0, -2.5));
        assert_eq!(parse_complex("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(parse_complex("0.5-1e-3i").unwrap(), C64::new(0.5, -1e-3));
        assert_eq!(parse_complex("1e-3+1e+2i").unwrap(), C64::new(1e-3, 100.0));
        assert_eq!(parse_complex("i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(parse_complex("2-i").unwrap(), C64::new(2.0, -1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn points_chunks_resolutions() {
        let p = parse_point("1, 0.5-0.2i, 2i").unwrap();
        assert_eq!(p, Complex3::new(C64::new(1.0, 0.0), C64::new(0.5, -0.2), C64::new(0.0, 2.0)));
        assert!(parse_point("1,2").is_err());
        assert_eq!("2/8".parse::<Chunk>().unwrap(), Chunk { index: 2, count: 8 });
        assert!("8/8".parse::<Chunk>().is_err());
        assert_eq!(
            "512x256".parse::<Resolution>().unwrap(),
            Resolution { width: 512, height: 256 }
        );
        assert!("8x8".parse::<Resolution>().is_err());
    }
}
