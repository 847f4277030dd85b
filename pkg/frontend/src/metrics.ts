/**
 * Evaluation report in the same JSON schema the Python pipeline emits:
 * per-class precision/recall/F1/support, overall and top-3 accuracy, and
 * unweighted macro averages.  0/0 ratios are defined as 0.
 */

export interface ClassEntry {
  name: string;
  precision: number;
  recall: number;
  f1: number;
  support: number;
}

export interface MetricsReport {
  classes: ClassEntry[];
  accuracy: number;
  top3_accuracy: number | null;
  macro: { precision: number; recall: number; f1: number };
}

export function confusion(
  preds: number[],
  labels: number[],
  classCount: number,
): number[][] {
  if (preds.length !== labels.length) {
    throw new Error('prediction/label length mismatch');
  }
  const cm = Array.from({ length: classCount }, () =>
    new Array<number>(classCount).fill(0),
  );
  for (let i = 0; i < preds.length; i++) {
    if (
      preds[i] < 0 || preds[i] >= classCount ||
      labels[i] < 0 || labels[i] >= classCount
    ) {
      throw new Error('class index out of range');
    }
    cm[labels[i]][preds[i]] += 1; // rows are the true class
  }
  return cm;
}

const safeDiv = (num: number, den: number) => (den ? num / den : 0);

export function buildReport(
  cm: number[][],
  classNames: string[],
  top3Accuracy: number | null = null,
): MetricsReport {
  const k = cm.length;
  const classes: ClassEntry[] = [];
  for (let i = 0; i < k; i++) {
    const tp = cm[i][i];
    const fp = cm.reduce((acc, row) => acc + row[i], 0) - tp;
    const fn = cm[i].reduce((a, b) => a + b, 0) - tp;
    const precision = safeDiv(tp, tp + fp);
    const recall = safeDiv(tp, tp + fn);
    classes.push({
      name: classNames[i],
      precision,
      recall,
      f1: safeDiv(2 * precision * recall, precision + recall),
      support: tp + fn,
    });
  }
  const total = cm.flat().reduce((a, b) => a + b, 0);
  const correct = cm.reduce((acc, row, i) => acc + row[i], 0);
  const mean = (xs: number[]) =>
    xs.length ? xs.reduce((a, b) => a + b, 0) / xs.length : 0;
  return {
    classes,
    accuracy: safeDiv(correct, total),
    top3_accuracy: top3Accuracy,
    macro: {
      precision: mean(classes.map((c) => c.precision)),
      recall: mean(classes.map((c) => c.recall)),
      f1: mean(classes.map((c) => c.f1)),
    },
  };
}

/** Top-k hit rate; ranking ties are broken by ascending class index. */
export function topkAccuracy(
  probs: number[][],
  labels: number[],
  k: number,
): number {
  if (!probs.length) return 0;
  let hits = 0;
  for (let i = 0; i < probs.length; i++) {
    const order = probs[i]
      .map((p, c) => [p, c] as const)
      .sort((a, b) => b[0] - a[0] || a[1] - b[1])
      .slice(0, k)
      .map(([, c]) => c);
    if (order.includes(labels[i])) hits += 1;
  }
  return hits / probs.length;
}
