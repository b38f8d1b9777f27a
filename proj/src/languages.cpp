#include "alignforge/languages.hpp"

#include <map>

#include "alignforge/error.hpp"
#include "alignforge/text.hpp"

namespace alignforge::languages {

namespace {

const std::map<std::string, std::string, std::less<>>& table() {
  static const std::map<std::string, std::string, std::less<>> kNames = {
      {"af", "Afrikaans"},  {"am", "Amharic"},     {"ar", "Arabic"},      {"as", "Assamese"},
      {"az", "Azerbaijani"}, {"be", "Belarusian"}, {"bg", "Bulgarian"},   {"bn", "Bengali"},
      {"br", "Breton"},     {"bs", "Bosnian"},     {"ca", "Catalan"},     {"cs", "Czech"},
      {"cy", "Welsh"},      {"da", "Danish"},      {"de", "German"},      {"el", "Greek"},
      {"en", "English"},    {"eo", "Esperanto"},   {"es", "Spanish"},     {"et", "Estonian"},
      {"eu", "Basque"},     {"fa", "Persian"},     {"fi", "Finnish"},     {"fr", "French"},
      {"fy", "Western Frisian"}, {"ga", "Irish"},  {"gd", "Scottish Gaelic"}, {"gl", "Galician"},
      {"gu", "Gujarati"},   {"ha", "Hausa"},       {"he", "Hebrew"},      {"hi", "Hindi"},
      {"hr", "Croatian"},   {"hu", "Hungarian"},   {"hy", "Armenian"},    {"id", "Indonesian"},
      {"ig", "Igbo"},       {"is", "Icelandic"},   {"it", "Italian"},     {"ja", "Japanese"},
      {"ka", "Georgian"},   {"kk", "Kazakh"},      {"km", "Khmer"},       {"kn", "Kannada"},
      {"ko", "Korean"},     {"ku", "Kurdish"},     {"ky", "Kyrgyz"},      {"li", "Limburgish"},
      {"lt", "Lithuanian"}, {"lv", "Latvian"},     {"mg", "Malagasy"},    {"mk", "Macedonian"},
      {"ml", "Malayalam"},  {"mn", "Mongolian"},   {"mr", "Marathi"},     {"ms", "Malay"},
      {"mt", "Maltese"},    {"my", "Burmese"},     {"nb", "Norwegian Bokmål"}, {"ne", "Nepali"},
      {"nl", "Dutch"},      {"nn", "Norwegian Nynorsk"}, {"no", "Norwegian"}, {"oc", "Occitan"},
      {"or", "Oriya"},      {"pa", "Punjabi"},     {"pl", "Polish"},      {"ps", "Pashto"},
      {"pt", "Portuguese"}, {"ro", "Romanian"},    {"ru", "Russian"},     {"rw", "Kinyarwanda"},
      {"se", "Northern Sami"}, {"sh", "Serbo-Croatian"}, {"si", "Sinhala"}, {"sk", "Slovak"},
      {"sl", "Slovenian"},  {"sq", "Albanian"},    {"sr", "Serbian"},     {"sv", "Swedish"},
      {"sw", "Swahili"},    {"ta", "Tamil"},       {"te", "Telugu"},      {"tg", "Tajik"},
      {"th", "Thai"},       {"tk", "Turkmen"},     {"tr", "Turkish"},     {"tt", "Tatar"},
      {"ug", "Uyghur"},     {"uk", "Ukrainian"},   {"ur", "Urdu"},        {"uz", "Northern Uzbek"},
      {"vi", "Vietnamese"}, {"wa", "Walloon"},     {"xh", "Xhosa"},       {"yi", "Eastern Yiddish"},
      {"yo", "Yoruba"},     {"zh", "Chinese"},     {"zu", "Zulu"},
  };
  return kNames;
}

}  // namespace

const std::string& name(std::string_view code) {
  auto it = table().find(code);
  if (it == table().end()) {
    const auto codes = known_codes();
    throw UsageError("unknown language code '" + std::string(code) + "'; known codes: " + text::join(codes, ", "));
  }
  return it->second;
}

bool is_known(std::string_view code) { return table().find(code) != table().end(); }

std::vector<std::string> known_codes() {
  std::vector<std::string> out;
  for (const auto& [code, _] : table()) out.push_back(code);
  return out;
}

}  // namespace alignforge::languages
