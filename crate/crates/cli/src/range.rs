use std::fmt;
use std::str::FromStr;

/// A single value `x` or an ordered pair `a:b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub start: f64,
    pub end: f64,
}

impl Span {
    pub fn is_point(&self) -> bool {
        self.start == self.end
    }

    pub fn lo(&self) -> f64 {
        self.start.min(self.end)
    }

    pub fn hi(&self) -> f64 {
        self.start.max(self.end)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    /// `count ≥ 2` points from `start` to `end` inclusive.
    pub fn linspace(&self, count: usize) -> Vec<f64> {
        let step = (self.end - self.start) / (count - 1) as f64;
        (0..count)
            .map(|i| {
                if i + 1 == count {
                    self.end
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |x: &str| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{x}` is not a finite number"))
        };
        let (start, end) = match s.split_once(':') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        Ok(Span { start, end })
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}:{}", self.start, self.end)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_points_and_pairs() {
        assert_eq!(
            "2.5".parse::<Span>().unwrap(),
            Span {
                start: 2.5,
                end: 2.5
            }
        );
        let s: Span = "-2:4".parse().unwrap();
        assert_eq!((s.start, s.end), (-2.0, 4.0));
        let s: Span = "4:1".parse().unwrap();
        assert_eq!((s.lo(), s.hi()), (1.0, 4.0));
        assert!("a:1".parse::<Span>().is_err());
        assert!("1:inf".parse::<Span>().is_err());
        assert_eq!(s.to_string(), "4:1");
    }

    #[test]
    fn linspace_hits_both_ends() {
        let s: Span = "4:1".parse().unwrap();
        let v = s.linspace(4);
        assert_eq!(v, vec![4.0, 3.0, 2.0, 1.0]);
    }
}
