//! Little-endian mixed-radix index arithmetic (first digit fastest).

pub(crate) fn product(radices: &[usize]) -> usize {
    radices.iter().product()
}

/// Splits `flat` into digits, first radix least significant.
pub(crate) fn split(mut flat: usize, radices: &[usize], digits: &mut [usize]) {
    debug_assert_eq!(radices.len(), digits.len());
    for (d, &r) in digits.iter_mut().zip(radices) {
        *d = flat % r;
        flat /= r;
    }
}

pub(crate) fn join(digits: &[usize], radices: &[usize]) -> usize {
    debug_assert_eq!(radices.len(), digits.len());
    digits
        .iter()
        .zip(radices)
        .rev()
        .fold(0, |acc, (&d, &r)| acc * r + d)
}

/// Advances `digits` like an odometer; returns false after the last tuple.
pub(crate) fn advance(digits: &mut [usize], radices: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radices) {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_join_roundtrip() {
        let radices = [2, 3, 4];
        let mut digits = [0; 3];
        for flat in 0..product(&radices) {
            split(flat, &radices, &mut digits);
            assert_eq!(join(&digits, &radices), flat);
        }
    }

    #[test]
    fn advance_visits_in_flat_order() {
        let radices = [3, 1, 2];
        let mut digits = [0; 3];
        let mut flat = 0;
        loop {
            assert_eq!(join(&digits, &radices), flat);
            flat += 1;
            if !advance(&mut digits, &radices) {
                break;
            }
        }
        assert_eq!(flat, 6);
    }
}
