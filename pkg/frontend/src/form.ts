// Questionnaire form: builds the rating items, validates completeness,
// and assembles the service payload.  Submission stays disabled until
// every item is answered.

import type { RatingPayload } from "./types";

export interface ItemSpec {
  key: string;
  label: string;
  lo: number;
  hi: number;
  loAnchor: string;
  hiAnchor: string;
  kind: "radio" | "slider";
}

// Item wording is this client's own; the scales match the engine contract.
export const FORM_ITEMS: ItemSpec[] = [
  {
    key: "trust_1",
    label: "I trust the vehicle's signal.",
    lo: 1, hi: 5, loAnchor: "Strongly disagree", hiAnchor: "Strongly agree",
    kind: "radio",
  },
  {
    key: "trust_2",
    label: "I can rely on the vehicle's signal.",
    lo: 1, hi: 5, loAnchor: "Strongly disagree", hiAnchor: "Strongly agree",
    kind: "radio",
  },
  {
    key: "predictability_1",
    label: "It was always clear to me what the vehicle was doing.",
    lo: 1, hi: 5, loAnchor: "Strongly disagree", hiAnchor: "Strongly agree",
    kind: "radio",
  },
  {
    key: "predictability_2",
    label: "I understood why the vehicle behaved the way it did.",
    lo: 1, hi: 5, loAnchor: "Strongly disagree", hiAnchor: "Strongly agree",
    kind: "radio",
  },
  {
    // inverse item: agreement means low predictability
    key: "predictability_3",
    label: "The vehicle behaved unpredictably.",
    lo: 1, hi: 5, loAnchor: "Strongly disagree", hiAnchor: "Strongly agree",
    kind: "radio",
  },
  {
    // inverse item
    key: "predictability_4",
    label: "It was hard to tell what the vehicle would do next.",
    lo: 1, hi: 5, loAnchor: "Strongly disagree", hiAnchor: "Strongly agree",
    kind: "radio",
  },
  {
    key: "mental_demand",
    label: "How mentally demanding was deciding when to cross?",
    lo: 1, hi: 20, loAnchor: "Very low", hiAnchor: "Very high",
    kind: "slider",
  },
  {
    key: "safety_1",
    label: "While crossing I felt:",
    lo: -3, hi: 3, loAnchor: "uneasy", hiAnchor: "at ease",
    kind: "radio",
  },
  {
    key: "safety_2",
    label: "While crossing I felt:",
    lo: -3, hi: 3, loAnchor: "tense", hiAnchor: "calm",
    kind: "radio",
  },
  {
    key: "safety_3",
    label: "While crossing I felt:",
    lo: -3, hi: 3, loAnchor: "unsafe", hiAnchor: "safe",
    kind: "radio",
  },
  {
    key: "safety_4",
    label: "While crossing I felt:",
    lo: -3, hi: 3, loAnchor: "hesitant", hiAnchor: "confident",
    kind: "radio",
  },
  {
    key: "usefulness",
    label: "I find the vehicle's display useful.",
    lo: 1, hi: 7, loAnchor: "Strongly disagree", hiAnchor: "Strongly agree",
    kind: "radio",
  },
  {
    key: "satisfaction",
    label: "I find the vehicle's display satisfying.",
    lo: 1, hi: 7, loAnchor: "Strongly disagree", hiAnchor: "Strongly agree",
    kind: "radio",
  },
  {
    key: "visual_appeal",
    label: "I find the vehicle's display visually appealing.",
    lo: 1, hi: 7, loAnchor: "Strongly disagree", hiAnchor: "Strongly agree",
    kind: "radio",
  },
];

export type FormAnswers = Partial<Record<string, number>>;

export interface QuestionnaireForm {
  element: HTMLFormElement;
  answers(): FormAnswers;
  setAnswer(key: string, value: number): void;
  missingItems(): string[];
  /** null while any item is unanswered. */
  payload(iteration: number, timeToCrossS: number): RatingPayload | null;
  reset(): void;
}

function radioRow(form: HTMLFormElement, item: ItemSpec): HTMLElement {
  const row = document.createElement("fieldset");
  row.dataset.item = item.key;
  const legend = document.createElement("legend");
  legend.textContent = item.label;
  row.appendChild(legend);
  const scale = document.createElement("div");
  scale.className = "scale";
  const lo = document.createElement("span");
  lo.className = "anchor";
  lo.textContent = item.loAnchor;
  scale.appendChild(lo);
  for (let v = item.lo; v <= item.hi; v++) {
    const wrap = document.createElement("label");
    const input = document.createElement("input");
    input.type = "radio";
    input.name = item.key;
    input.value = String(v);
    wrap.appendChild(input);
    wrap.appendChild(document.createTextNode(String(v)));
    scale.appendChild(wrap);
  }
  const hi = document.createElement("span");
  hi.className = "anchor";
  hi.textContent = item.hiAnchor;
  scale.appendChild(hi);
  row.appendChild(scale);
  form.appendChild(row);
  return row;
}

function sliderRow(form: HTMLFormElement, item: ItemSpec): HTMLElement {
  const row = document.createElement("fieldset");
  row.dataset.item = item.key;
  const legend = document.createElement("legend");
  legend.textContent = item.label;
  row.appendChild(legend);
  const input = document.createElement("input");
  input.type = "range";
  input.name = item.key;
  input.min = String(item.lo);
  input.max = String(item.hi);
  input.step = "1";
  // a slider always reports a value; require an explicit touch instead
  input.dataset.touched = "false";
  input.addEventListener("input", () => {
    input.dataset.touched = "true";
  });
  const readout = document.createElement("output");
  readout.textContent = "-";
  input.addEventListener("input", () => {
    readout.textContent = input.value;
  });
  row.appendChild(input);
  row.appendChild(readout);
  const anchors = document.createElement("div");
  anchors.className = "scale";
  anchors.textContent = `${item.lo} = ${item.loAnchor}, ${item.hi} = ${item.hiAnchor}`;
  row.appendChild(anchors);
  form.appendChild(row);
  return row;
}

export function buildQuestionnaireForm(container: Element): QuestionnaireForm {
  const form = document.createElement("form");
  form.className = "questionnaire";
  form.addEventListener("submit", (e) => e.preventDefault());
  for (const item of FORM_ITEMS) {
    (item.kind === "radio" ? radioRow : sliderRow)(form, item);
  }
  container.appendChild(form);

  const answers = (): FormAnswers => {
    const out: FormAnswers = {};
    for (const item of FORM_ITEMS) {
      if (item.kind === "radio") {
        const checked = form.querySelector<HTMLInputElement>(
          `input[name="${item.key}"]:checked`,
        );
        if (checked) out[item.key] = Number(checked.value);
      } else {
        const slider = form.querySelector<HTMLInputElement>(
          `input[name="${item.key}"]`,
        );
        if (slider && slider.dataset.touched === "true") {
          out[item.key] = Number(slider.value);
        }
      }
    }
    return out;
  };

  const missingItems = (): string[] => {
    const got = answers();
    return FORM_ITEMS.filter((item) => got[item.key] === undefined).map(
      (item) => item.key,
    );
  };

  return {
    element: form,
    answers,
    missingItems,
    setAnswer(key, value) {
      const item = FORM_ITEMS.find((i) => i.key === key);
      if (!item) throw new Error(`unknown item ${key}`);
      if (item.kind === "radio") {
        const input = form.querySelector<HTMLInputElement>(
          `input[name="${key}"][value="${value}"]`,
        );
        if (!input) throw new Error(`value ${value} outside ${key} scale`);
        input.checked = true;
      } else {
        const slider = form.querySelector<HTMLInputElement>(
          `input[name="${key}"]`,
        )!;
        slider.value = String(value);
        slider.dataset.touched = "true";
      }
      form.dispatchEvent(new Event("change", { bubbles: true }));
    },
    payload(iteration, timeToCrossS) {
      const got = answers();
      if (missingItems().length > 0) return null;
      return {
        iteration,
        trust_items: [got.trust_1!, got.trust_2!],
        predictability_items: [
          got.predictability_1!,
          got.predictability_2!,
          got.predictability_3!,
          got.predictability_4!,
        ],
        mental_demand: got.mental_demand!,
        safety_items: [got.safety_1!, got.safety_2!, got.safety_3!, got.safety_4!],
        usefulness: got.usefulness!,
        satisfaction: got.satisfaction!,
        visual_appeal: got.visual_appeal!,
        time_to_cross_s: timeToCrossS,
      };
    },
    reset() {
      form.reset();
      form
        .querySelectorAll<HTMLInputElement>('input[type="range"]')
        .forEach((slider) => {
          slider.dataset.touched = "false";
        });
    },
  };
}

/**
 * The best possible answer for every item: scale maximum for the positive
 * items, minimum for mental demand and the inverse predictability items.
 */
export function fillAllBest(form: QuestionnaireForm): void {
  for (const item of FORM_ITEMS) {
    const inverse =
      item.key === "mental_demand" ||
      item.key === "predictability_3" ||
      item.key === "predictability_4";
    form.setAnswer(item.key, inverse ? item.lo : item.hi);
  }
}
