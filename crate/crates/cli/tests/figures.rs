use cpamm::figures::{emit_figure, FigureId, FigureParams, FigureSpec, Grid};

fn table(id: FigureId) -> cpamm::figures::Table {
    emit_figure(&FigureSpec::new(id)).unwrap()
}

fn csv_bytes(spec: &FigureSpec) -> Vec<u8> {
    let mut buf = Vec::new();
    emit_figure(spec).unwrap().write_csv(&mut buf).unwrap();
    buf
}

#[test]
fn every_figure_has_its_header_and_grid() {
    for id in FigureId::ALL {
        let t = table(id);
        assert_eq!(t.columns, id.columns());
        let grid = id.default_grid();
        assert_eq!(t.rows.len(), grid.samples);
        assert_eq!(t.rows[0][0], grid.min);
        assert_eq!(t.rows.last().unwrap()[0], grid.max);
        assert!(t
            .rows
            .iter()
            .all(|r| r.len() == t.columns.len() && r.iter().all(|v| v.is_finite())));
    }
}

#[test]
fn output_is_bit_identical_across_runs() {
    for id in FigureId::ALL {
        let spec = FigureSpec::new(id);
        assert_eq!(csv_bytes(&spec), csv_bytes(&spec), "{id}");
    }
}

#[test]
fn il_curve_reference_points() {
    let t = table(FigureId::IlOneCoin);
    let at = |pct: f64| t.rows.iter().find(|r| r[0] == pct).unwrap()[1];
    assert_eq!(at(0.0), 0.0);
    assert!((at(300.0) + 20.0).abs() < 1e-12);
    assert!((at(198.0) - 100.0 * (2.0 * 2.98f64.sqrt() / 3.98 - 1.0)).abs() < 1e-12);
}

#[test]
fn portfolio_curves_touch_only_at_no_move() {
    let t = table(FigureId::PortfolioOneCoin);
    for r in &t.rows {
        if r[0] == 0.0 {
            assert_eq!(r[1], r[2]);
        } else {
            assert!(r[1] < r[2], "{r:?}");
        }
    }
}

#[test]
fn roi_curves_start_flat_and_separate() {
    let t = table(FigureId::RoiComparison);
    assert_eq!(&t.rows[0][1..], &[0.0, 0.0]);
    for pair in t.rows.windows(2) {
        assert!(pair[1][1] > pair[0][1] && pair[1][2] > pair[0][2]);
    }
    let last = t.rows.last().unwrap();
    assert!(last[1] > last[2]);
}

#[test]
fn simulated_roi_feeds_corrected_comparison() {
    let params = FigureParams::default().with_simulated_roi().unwrap();
    assert!((params.compounding_roi_pct - 20.02).abs() < 0.01);
    assert!((params.not_compounding_roi_pct - 18.2).abs() < 0.05);
    let spec = FigureSpec {
        figure: FigureId::CorrectedFeeModelComparison,
        grid: Grid {
            min: 0.0,
            max: 100.0,
            samples: 2,
        },
        params,
    };
    let t = emit_figure(&spec).unwrap();
    assert!((t.rows[0][2] - (100.0 + params.compounding_roi_pct)).abs() < 1e-12);
    assert!((t.rows[0][3] - (100.0 + params.not_compounding_roi_pct)).abs() < 1e-12);
}

#[test]
fn column_lookup() {
    let t = table(FigureId::FeeModelComparison);
    assert_eq!(t.column("beaker").unwrap().len(), 400);
    assert!(t.column("missing").is_none());
}
