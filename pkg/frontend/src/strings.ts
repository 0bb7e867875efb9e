/** UI chrome strings; selectable independently of the answer language. */
export type Locale = "id" | "en";

const STRINGS = {
  id: {
    askPlaceholder: "Tanyakan tentang data keuangan dan peraturan...",
    askButton: "Tanya",
    sourcesHeading: "Sumber",
    noSources: "Tidak ada sumber untuk jawaban ini.",
    chartToggle: "Tampilkan grafik",
    tableToggle: "Tampilkan tabel",
    feedbackPrompt: "Nilai jawaban ini",
    feedbackRecorded: "Masukan tercatat. Terima kasih!",
    feedbackError: "Gagal mengirim masukan, coba lagi.",
    commentPlaceholder: "Komentar (opsional)",
    sendFeedback: "Kirim",
    pending: "Mencari jawaban...",
    emptyQuestion: "Pertanyaan tidak boleh kosong.",
  },
  en: {
    askPlaceholder: "Ask about financial data and regulations...",
    askButton: "Ask",
    sourcesHeading: "Sources",
    noSources: "No sources for this answer.",
    chartToggle: "Show chart",
    tableToggle: "Show table",
    feedbackPrompt: "Rate this answer",
    feedbackRecorded: "Feedback recorded. Thank you!",
    feedbackError: "Could not submit feedback, try again.",
    commentPlaceholder: "Comment (optional)",
    sendFeedback: "Send",
    pending: "Looking for an answer...",
    emptyQuestion: "The question cannot be empty.",
  },
} as const;

export type StringKey = keyof (typeof STRINGS)["en"];

export function t(locale: Locale, key: StringKey): string {
  return STRINGS[locale][key];
}
