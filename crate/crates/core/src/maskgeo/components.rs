use std::collections::VecDeque;

use super::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub(crate) fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        const EIGHT: [(isize, isize); 8] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

/// Labels every set pixel with a component index (starting at 1, in raster
/// order of first pixel). Returns the label raster and per-component sizes,
/// where `sizes[i]` belongs to label `i + 1`.
pub(crate) fn label_components(mask: &BinaryMask, conn: Connectivity) -> (Vec<u32>, Vec<usize>) {
    let (w, h) = (mask.width(), mask.height());
    let mut labels = vec![0u32; w * h];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !mask.get_index(start) || labels[start] != 0 {
            continue;
        }
        let id = sizes.len() as u32 + 1;
        labels[start] = id;
        queue.push_back(start);
        let mut size = 0usize;
        while let Some(i) = queue.pop_front() {
            size += 1;
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for &(dx, dy) in conn.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if mask.get_index(j) && labels[j] == 0 {
                    labels[j] = id;
                    queue.push_back(j);
                }
            }
        }
        sizes.push(size);
    }
    (labels, sizes)
}

/// Maximal connected sets of set pixels, largest first; equal sizes are
/// ordered by their first pixel in raster order.
pub fn connected_components(mask: &BinaryMask, conn: Connectivity) -> Vec<BinaryMask> {
    let (labels, sizes) = label_components(mask, conn);
    let mut out: Vec<BinaryMask> = (0..sizes.len())
        .map(|_| BinaryMask::new(mask.width(), mask.height()))
        .collect();
    for (i, &l) in labels.iter().enumerate() {
        if l != 0 {
            out[l as usize - 1].set_index(i, true);
        }
    }
    // labels are already in raster order of first pixel; stable sort keeps it
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]));
    let mut slots: Vec<Option<BinaryMask>> = out.into_iter().map(Some).collect();
    order.into_iter().map(|i| slots[i].take().unwrap()).collect()
}

/// Regions enclosed by the background contour: the 4-connected components of
/// the complement of `background`.
pub fn subcontour_regions(background: &BinaryMask) -> Vec<BinaryMask> {
    connected_components(&background.complement(), Connectivity::Four)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_disjoint_squares() {
        let m = BinaryMask::from_fn(10, 10, |x, y| (x < 3 && y < 3) || ((5..8).contains(&x) && (5..8).contains(&y)));
        let cs = connected_components(&m, Connectivity::Eight);
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.count() == 9));
        assert!(cs[0].get(0, 0));
    }

    #[test]
    fn empty_mask_has_no_components() {
        assert!(connected_components(&BinaryMask::new(4, 4), Connectivity::Four).is_empty());
    }

    #[test]
    fn plus_sign_single_component_both_connectivities() {
        let m = BinaryMask::from_ascii(&[".#.", "###", ".#."]);
        let c4 = connected_components(&m, Connectivity::Four);
        let c8 = connected_components(&m, Connectivity::Eight);
        assert_eq!(c4.len(), 1);
        assert_eq!(c4, c8);
        assert_eq!(c4[0], m);
    }

    #[test]
    fn diagonal_pixels_split_under_four() {
        let m = BinaryMask::from_ascii(&["#.", ".#"]);
        assert_eq!(connected_components(&m, Connectivity::Four).len(), 2);
        assert_eq!(connected_components(&m, Connectivity::Eight).len(), 1);
    }

    #[test]
    fn ordered_by_size_then_raster() {
        let m = BinaryMask::from_ascii(&["#..##", "...##", "#...."]);
        let cs = connected_components(&m, Connectivity::Four);
        assert_eq!(cs.iter().map(|c| c.count()).collect::<Vec<_>>(), vec![4, 1, 1]);
        assert!(cs[1].get(0, 0));
        assert!(cs[2].get(0, 2));
    }

    #[test]
    fn subcontours_of_disk_and_blank() {
        let disk = BinaryMask::from_fn(30, 30, |x, y| {
            let (dx, dy) = (x as f64 - 15.0, y as f64 - 15.0);
            dx * dx + dy * dy <= 36.0
        });
        let regions = subcontour_regions(&disk.complement());
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0], disk);
        assert!(subcontour_regions(&BinaryMask::full(8, 8)).is_empty());
    }

    #[test]
    fn adjacent_objects_form_one_region() {
        let fg = BinaryMask::from_fn(20, 10, |x, y| (2..10).contains(&x) && (2..8).contains(&y) || (10..15).contains(&x) && (3..6).contains(&y));
        let regions = subcontour_regions(&fg.complement());
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0], fg);
    }
}
