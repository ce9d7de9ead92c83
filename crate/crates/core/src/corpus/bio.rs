//! BIO label parsing, validation, and repair.

/// A parsed BIO label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind<'a> {
    Outside,
    Begin(&'a str),
    Inside(&'a str),
}

impl<'a> LabelKind<'a> {
    pub fn parse(label: &'a str) -> Option<Self> {
        if label == "O" {
            return Some(LabelKind::Outside);
        }
        if let Some(class) = label.strip_prefix("B-") {
            if !class.is_empty() {
                return Some(LabelKind::Begin(class));
            }
        }
        if let Some(class) = label.strip_prefix("I-") {
            if !class.is_empty() {
                return Some(LabelKind::Inside(class));
            }
        }
        None
    }

    pub fn class(&self) -> Option<&'a str> {
        match self {
            LabelKind::Outside => None,
            LabelKind::Begin(c) | LabelKind::Inside(c) => Some(c),
        }
    }
}

/// Entity class of a label with the B-/I- prefix stripped; `None` for "O".
pub fn label_class(label: &str) -> Option<&str> {
    LabelKind::parse(label).and_then(|k| match k {
        LabelKind::Outside => None,
        LabelKind::Begin(c) | LabelKind::Inside(c) => Some(c),
    })
}

/// Checks that every label is well-formed and no I- label follows "O" or a
/// different class.
pub fn validate_bio(labels: &[String]) -> Result<(), String> {
    let mut prev_class: Option<&str> = None;
    for (i, label) in labels.iter().enumerate() {
        let kind = LabelKind::parse(label)
            .ok_or_else(|| format!("malformed label {label:?} at position {i}"))?;
        if let LabelKind::Inside(class) = kind {
            if prev_class != Some(class) {
                return Err(format!(
                    "invalid BIO transition: I-{class} at position {i} does not continue an entity"
                ));
            }
        }
        prev_class = kind.class();
    }
    Ok(())
}

/// A single repaired label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BioRepair {
    pub position: usize,
    pub from: String,
    pub to: String,
}

/// Rewrites I- labels that open an entity (after "O", a different class, or at
/// the start) to B-. Malformed labels become "O". Returns the repairs made.
pub fn repair_bio(labels: &mut [String]) -> Vec<BioRepair> {
    let mut repairs = Vec::new();
    let mut prev_class: Option<String> = None;
    for i in 0..labels.len() {
        let replacement = match LabelKind::parse(&labels[i]) {
            None => Some("O".to_string()),
            Some(LabelKind::Inside(class)) if prev_class.as_deref() != Some(class) => {
                Some(format!("B-{class}"))
            }
            _ => None,
        };
        if let Some(to) = replacement {
            repairs.push(BioRepair {
                position: i,
                from: labels[i].clone(),
                to: to.clone(),
            });
            labels[i] = to;
        }
        prev_class = label_class(&labels[i]).map(str::to_string);
    }
    repairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn valid_sequences_pass() {
        assert!(validate_bio(&labels(&["O", "B-N", "I-N", "O", "B-D"])).is_ok());
        assert!(validate_bio(&labels(&[])).is_ok());
    }

    #[test]
    fn inside_after_outside_fails() {
        assert!(validate_bio(&labels(&["O", "I-N"])).is_err());
        assert!(validate_bio(&labels(&["I-N"])).is_err());
        assert!(validate_bio(&labels(&["B-D", "I-N"])).is_err());
    }

    #[test]
    fn malformed_label_fails() {
        assert!(validate_bio(&labels(&["B-"])).is_err());
        assert!(validate_bio(&labels(&["NAME"])).is_err());
    }

    #[test]
    fn repair_rewrites_opening_inside() {
        let mut l = labels(&["I-NAME", "I-NAME", "O", "B-D", "I-N"]);
        let repairs = repair_bio(&mut l);
        assert_eq!(l, labels(&["B-NAME", "I-NAME", "O", "B-D", "B-N"]));
        assert_eq!(repairs.len(), 2);
        assert_eq!(repairs[0].position, 0);
        assert_eq!(repairs[0].to, "B-NAME");
        assert!(validate_bio(&l).is_ok());
    }

    #[test]
    fn repair_is_noop_on_valid_input() {
        let mut l = labels(&["O", "B-N", "I-N"]);
        assert!(repair_bio(&mut l).is_empty());
        assert_eq!(l, labels(&["O", "B-N", "I-N"]));
    }
}
