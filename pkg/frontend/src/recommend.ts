/** Recommendation panel: enter a target outcome, show the ranked list. */

import type { RecommendPayload } from "./types.js";

export function renderRecommendPanel(
  container: HTMLElement,
  payload: RecommendPayload | null,
  onSubmit: (target: number) => void,
): void {
  container.textContent = "";

  const form = document.createElement("form");
  form.setAttribute("class", "recommend-form");
  const input = document.createElement("input");
  input.type = "number";
  input.step = "any";
  input.placeholder = "target outcome";
  input.setAttribute("class", "recommend-target");
  const button = document.createElement("button");
  button.type = "submit";
  button.textContent = "Recommend";
  form.appendChild(input);
  form.appendChild(button);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const target = Number(input.value);
    if (Number.isFinite(target)) onSubmit(target);
  });
  container.appendChild(form);

  if (payload === null) return;
  const list = document.createElement("ol");
  list.setAttribute("class", "recommend-list");
  for (const rec of payload.recommendations) {
    const item = document.createElement("li");
    item.setAttribute("data-attribute", rec.attribute);
    item.textContent =
      `set ${rec.attribute} = ${rec.value} -> ` +
      `${rec.predicted_outcome} (off by ${rec.distance})`;
    list.appendChild(item);
  }
  container.appendChild(list);
}
