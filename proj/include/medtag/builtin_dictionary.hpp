#pragma once

#include <string_view>

#include "medtag/dictionary.hpp"

namespace medtag {

// Synthetic concept dictionary: ~200 entries spanning the 14 symptom body
// systems, 32 medication groups, and 11 complaint groups. Checked in verbatim
// as data/dictionary.tsv for use outside the library.
inline std::string_view ConceptDictionary::builtin_tsv() {
  static constexpr std::string_view tsv =
      "surface\tconcept_id\tsemantic_type\ttask\tlabel\n"
      // Symptoms (semantic type 0 = sign or symptom).
      "palpitations\tY1001\t0\tSYM\tCardiovascular\n"
      "chest tightness\tY1002\t0\tSYM\tCardiovascular\n"
      "racing heartbeat\tY1003\t0\tSYM\tCardiovascular\n"
      "irregular pulse\tY1004\t0\tSYM\tCardiovascular\n"
      "ankle swelling\tY1005\t0\tSYM\tCardiovascular\n"
      "night sweats\tY1006\t0\tSYM\tGeneral\n"
      "chills\tY1007\t0\tSYM\tGeneral\n"
      "low grade fever\tY1008\t0\tSYM\tGeneral\n"
      "unintended weight loss\tY1009\t0\tSYM\tGeneral\n"
      "constant fatigue\tY1010\t0\tSYM\tGeneral\n"
      "joint stiffness\tY1011\t0\tSYM\tMusculoskeletal\n"
      "lower back ache\tY1012\t0\tSYM\tMusculoskeletal\n"
      "muscle cramps\tY1013\t0\tSYM\tMusculoskeletal\n"
      "knee soreness\tY1014\t0\tSYM\tMusculoskeletal\n"
      "shoulder stiffness\tY1015\t0\tSYM\tMusculoskeletal\n"
      "shortness of breath\tY1016\t0\tSYM\tRespiratory\n"
      "wheezing\tY1017\t0\tSYM\tRespiratory\n"
      "persistent cough\tY1018\t0\tSYM\tRespiratory\n"
      "chest congestion\tY1019\t0\tSYM\tRespiratory\n"
      "labored breathing\tY1020\t0\tSYM\tRespiratory\n"
      "excessive thirst\tY1021\t0\tSYM\tEndocrine\n"
      "heat intolerance\tY1022\t0\tSYM\tEndocrine\n"
      "cold intolerance\tY1023\t0\tSYM\tEndocrine\n"
      "sugar crashes\tY1024\t0\tSYM\tEndocrine\n"
      "hair thinning\tY1025\t0\tSYM\tEndocrine\n"
      "sore throat\tY1026\t0\tSYM\tEar Nose Throat\n"
      "ringing ears\tY1027\t0\tSYM\tEar Nose Throat\n"
      "nasal congestion\tY1028\t0\tSYM\tEar Nose Throat\n"
      "hoarse voice\tY1029\t0\tSYM\tEar Nose Throat\n"
      "ear fullness\tY1030\t0\tSYM\tEar Nose Throat\n"
      "blurred vision\tY1031\t0\tSYM\tEyes\n"
      "double vision\tY1032\t0\tSYM\tEyes\n"
      "dry eyes\tY1033\t0\tSYM\tEyes\n"
      "eye redness\tY1034\t0\tSYM\tEyes\n"
      "light sensitivity\tY1035\t0\tSYM\tEyes\n"
      "heartburn\tY1036\t0\tSYM\tGastrointestinal\n"
      "nausea\tY1037\t0\tSYM\tGastrointestinal\n"
      "stomach cramps\tY1038\t0\tSYM\tGastrointestinal\n"
      "bloating\tY1039\t0\tSYM\tGastrointestinal\n"
      "constipation\tY1040\t0\tSYM\tGastrointestinal\n"
      "pelvic soreness\tY1041\t0\tSYM\tGenital\n"
      "irregular periods\tY1042\t0\tSYM\tGenital\n"
      "genital rash\tY1043\t0\tSYM\tGenital\n"
      "groin discomfort\tY1044\t0\tSYM\tGenital\n"
      "menstrual cramping\tY1045\t0\tSYM\tGenital\n"
      "pounding headache\tY1046\t0\tSYM\tHead\n"
      "migraine aura\tY1047\t0\tSYM\tHead\n"
      "scalp tenderness\tY1048\t0\tSYM\tHead\n"
      "head pressure\tY1049\t0\tSYM\tHead\n"
      "temple throbbing\tY1050\t0\tSYM\tHead\n"
      "numb fingers\tY1051\t0\tSYM\tNeurological\n"
      "tingling toes\tY1052\t0\tSYM\tNeurological\n"
      "dizzy spells\tY1053\t0\tSYM\tNeurological\n"
      "hand tremors\tY1054\t0\tSYM\tNeurological\n"
      "memory lapses\tY1055\t0\tSYM\tNeurological\n"
      "anxious thoughts\tY1056\t0\tSYM\tPsychiatric\n"
      "sleepless nights\tY1057\t0\tSYM\tPsychiatric\n"
      "panic episodes\tY1058\t0\tSYM\tPsychiatric\n"
      "low mood\tY1059\t0\tSYM\tPsychiatric\n"
      "racing thoughts\tY1060\t0\tSYM\tPsychiatric\n"
      "itchy rash\tY1061\t0\tSYM\tSkin\n"
      "skin dryness\tY1062\t0\tSYM\tSkin\n"
      "hives outbreak\tY1063\t0\tSYM\tSkin\n"
      "easy bruising\tY1064\t0\tSYM\tSkin\n"
      "scaly patches\tY1065\t0\tSYM\tSkin\n"
      "burning urination\tY1066\t0\tSYM\tUrinary\n"
      "frequent urination\tY1067\t0\tSYM\tUrinary\n"
      "urine leakage\tY1068\t0\tSYM\tUrinary\n"
      "cloudy urine\tY1069\t0\tSYM\tUrinary\n"
      "nighttime urination\tY1070\t0\tSYM\tUrinary\n"
      // Medications (semantic type 1 = pharmacologic substance unless noted).
      "botox\tY2001\t1\tMED\tDFCBM/Chemical Modifier/Toxin\n"
      "botulinum toxin\tY2002\t1\tMED\tDFCBM/Chemical Modifier/Toxin\n"
      "fish oil\tY2003\t6\tMED\tDFCBM/Dietary Supplement\n"
      "vitamin d\tY2004\t6\tMED\tDFCBM/Dietary Supplement\n"
      "multivitamin\tY2005\t6\tMED\tDFCBM/Dietary Supplement\n"
      "potassium chloride\tY2006\t1\tMED\tDFCBM/Drug or Chemical by Structure\n"
      "ferrous sulfate\tY2007\t1\tMED\tDFCBM/Drug or Chemical by Structure\n"
      "prune juice\tY2008\t4\tMED\tDFCBM/Food or Food Product\n"
      "protein shakes\tY2009\t4\tMED\tDFCBM/Food or Food Product\n"
      "petroleum jelly\tY2010\t1\tMED\tDFCBM/Industrial Aid\n"
      "mineral oil\tY2011\t1\tMED\tDFCBM/Industrial Aid\n"
      "ginger extract\tY2012\t1\tMED\tDFCBM/Natural Product\n"
      "turmeric capsules\tY2013\t1\tMED\tDFCBM/Natural Product\n"
      "aluminum hydroxide\tY2014\t1\tMED\tDFCBM/Pharmacologic Substance/Adjuvant\n"
      "squalene\tY2015\t1\tMED\tDFCBM/Pharmacologic Substance/Adjuvant\n"
      "warfarin\tY2016\t1\tMED\tDFCBM/Pharmacologic Substance/AA Blood or Body Fluid\n"
      "heparin\tY2017\t1\tMED\tDFCBM/Pharmacologic Substance/AA Blood or Body Fluid\n"
      "clopidogrel\tY2018\t1\tMED\tDFCBM/Pharmacologic Substance/AA Blood or Body Fluid\n"
      "lisinopril\tY2019\t1\tMED\tDFCBM/Pharmacologic Substance/AA Cardiovascular System\n"
      "metoprolol\tY2020\t1\tMED\tDFCBM/Pharmacologic Substance/AA Cardiovascular System\n"
      "amlodipine\tY2021\t1\tMED\tDFCBM/Pharmacologic Substance/AA Cardiovascular System\n"
      "atorvastatin\tY2022\t1\tMED\tDFCBM/Pharmacologic Substance/AA Cardiovascular System\n"
      "omeprazole\tY2023\t1\tMED\tDFCBM/Pharmacologic Substance/AA Digestive System or Metabolism\n"
      "metformin\tY2024\t1\tMED\tDFCBM/Pharmacologic Substance/AA Digestive System or Metabolism\n"
      "insulin\tY2025\t1\tMED\tDFCBM/Pharmacologic Substance/AA Digestive System or Metabolism\n"
      "hydrocortisone cream\tY2026\t1\tMED\tDFCBM/Pharmacologic Substance/AA Integumentary System\n"
      "clobetasol\tY2027\t1\tMED\tDFCBM/Pharmacologic Substance/AA Integumentary System\n"
      "baclofen\tY2028\t1\tMED\tDFCBM/Pharmacologic Substance/AA Musculoskeletal System\n"
      "cyclobenzaprine\tY2029\t1\tMED\tDFCBM/Pharmacologic Substance/AA Musculoskeletal System\n"
      "alendronate\tY2030\t1\tMED\tDFCBM/Pharmacologic Substance/AA Musculoskeletal System\n"
      "gabapentin\tY2031\t1\tMED\tDFCBM/Pharmacologic Substance/AA Nervous System\n"
      "sertraline\tY2032\t1\tMED\tDFCBM/Pharmacologic Substance/AA Nervous System\n"
      "sumatriptan\tY2033\t1\tMED\tDFCBM/Pharmacologic Substance/AA Nervous System\n"
      "artificial tears\tY2034\t1\tMED\tDFCBM/Pharmacologic Substance/AA Organs of Special Senses\n"
      "timolol drops\tY2035\t1\tMED\tDFCBM/Pharmacologic Substance/AA Organs of Special Senses\n"
      "albuterol\tY2036\t1\tMED\tDFCBM/Pharmacologic Substance/AA Respiratory System\n"
      "fluticasone inhaler\tY2037\t1\tMED\tDFCBM/Pharmacologic Substance/AA Respiratory System\n"
      "montelukast\tY2038\t1\tMED\tDFCBM/Pharmacologic Substance/AA Respiratory System\n"
      "amoxicillin\tY2039\t1\tMED\tDFCBM/Pharmacologic Substance/Anti-Infective Agent\n"
      "azithromycin\tY2040\t1\tMED\tDFCBM/Pharmacologic Substance/Anti-Infective Agent\n"
      "valacyclovir\tY2041\t1\tMED\tDFCBM/Pharmacologic Substance/Anti-Infective Agent\n"
      "tamoxifen\tY2042\t1\tMED\tDFCBM/Pharmacologic Substance/Antineoplastic Agent\n"
      "methotrexate\tY2043\t1\tMED\tDFCBM/Pharmacologic Substance/Antineoplastic Agent\n"
      "adalimumab\tY2044\t1\tMED\tDFCBM/Pharmacologic Substance/Biological Agent\n"
      "rituximab\tY2045\t1\tMED\tDFCBM/Pharmacologic Substance/Biological Agent\n"
      "verapamil\tY2046\t1\tMED\tDFCBM/Pharmacologic Substance/Cation Channel Blocker\n"
      "diltiazem\tY2047\t1\tMED\tDFCBM/Pharmacologic Substance/Cation Channel Blocker\n"
      "raloxifene\tY2048\t1\tMED\tDFCBM/Pharmacologic Substance/Chemopreventive Agent\n"
      "finasteride\tY2049\t1\tMED\tDFCBM/Pharmacologic Substance/Chemopreventive Agent\n"
      "sacubitril valsartan\tY2050\t1\tMED\tDFCBM/Pharmacologic Substance/Combination Medication\n"
      "combination inhaler\tY2051\t1\tMED\tDFCBM/Pharmacologic Substance/Combination Medication\n"
      "bosentan\tY2052\t1\tMED\tDFCBM/Pharmacologic Substance/Endothelin Receptor Antagonist\n"
      "ambrisentan\tY2053\t1\tMED\tDFCBM/Pharmacologic Substance/Endothelin Receptor Antagonist\n"
      "allopurinol\tY2054\t1\tMED\tDFCBM/Pharmacologic Substance/Enzyme Inhibitor\n"
      "sitagliptin\tY2055\t1\tMED\tDFCBM/Pharmacologic Substance/Enzyme Inhibitor\n"
      "levothyroxine\tY2056\t1\tMED\tDFCBM/Pharmacologic Substance/Hormone Therapy Agent\n"
      "estradiol patch\tY2057\t1\tMED\tDFCBM/Pharmacologic Substance/Hormone Therapy Agent\n"
      "pembrolizumab\tY2058\t1\tMED\tDFCBM/Pharmacologic Substance/Immunotherapeutic Agent\n"
      "interferon beta\tY2059\t1\tMED\tDFCBM/Pharmacologic Substance/Immunotherapeutic Agent\n"
      "latanoprost\tY2060\t1\tMED\tDFCBM/Pharmacologic Substance/Prostaglandin Analogue\n"
      "misoprostol\tY2061\t1\tMED\tDFCBM/Pharmacologic Substance/Prostaglandin Analogue\n"
      "sucralfate\tY2062\t1\tMED\tDFCBM/Pharmacologic Substance/Protective Agent\n"
      "amifostine\tY2063\t1\tMED\tDFCBM/Pharmacologic Substance/Protective Agent\n"
      "doxycycline\tY2064\t1\tMED\tDFCBM/Pharmacologic Substance/Protein Synthesis Inhibitor\n"
      "clindamycin\tY2065\t1\tMED\tDFCBM/Pharmacologic Substance/Protein Synthesis Inhibitor\n"
      "erythropoietin\tY2066\t1\tMED\tDFCBM/Physiology-Regulatory Factor\n"
      "melatonin\tY2067\t1\tMED\tDFCBM/Physiology-Regulatory Factor\n"
      "physical therapy\tY2068\t5\tMED\tActivity/Clinical or Research Activity/Intervention or Procedure\n"
      "cortisone injection\tY2069\t5\tMED\tActivity/Clinical or Research Activity/Intervention or Procedure\n"
      "nebulizer machine\tY2070\t7\tMED\tManufactured Object/Diagnostic, Therapeutic, or Research Equipment\n"
      "glucose meter\tY2071\t7\tMED\tManufactured Object/Diagnostic, Therapeutic, or Research Equipment\n"
      "herbal tincture\tY2072\t1\tMED\tOthers\n"
      "cough drops\tY2073\t1\tMED\tOthers\n"
      // Complaints (semantic type 2 = disease or syndrome; 3 = finding).
      "fibromyalgia\tY3001\t2\tCOM\tGeneral\n"
      "chronic pain syndrome\tY3002\t2\tCOM\tGeneral\n"
      "dehydration\tY3003\t3\tCOM\tGeneral\n"
      "insomnia disorder\tY3004\t2\tCOM\tGeneral\n"
      "obesity\tY3005\t3\tCOM\tGeneral\n"
      "iron deficiency anemia\tY3006\t2\tCOM\tDisorder of hematopoietic structure\n"
      "sickle cell disease\tY3007\t2\tCOM\tDisorder of hematopoietic structure\n"
      "low platelet count\tY3008\t3\tCOM\tDisorder of hematopoietic structure\n"
      "b12 deficiency\tY3009\t2\tCOM\tDisorder of hematopoietic structure\n"
      "psoriasis\tY3010\t2\tCOM\tDisorder of integument, immune system, endocrine\n"
      "eczema flare\tY3011\t2\tCOM\tDisorder of integument, immune system, endocrine\n"
      "hypothyroidism\tY3012\t2\tCOM\tDisorder of integument, immune system, endocrine\n"
      "type two diabetes\tY3013\t2\tCOM\tDisorder of integument, immune system, endocrine\n"
      "lupus\tY3014\t2\tCOM\tDisorder of integument, immune system, endocrine\n"
      "osteoarthritis\tY3015\t2\tCOM\tDisorder of musculoskeletal system\n"
      "rheumatoid arthritis\tY3016\t2\tCOM\tDisorder of musculoskeletal system\n"
      "sciatica\tY3017\t2\tCOM\tDisorder of musculoskeletal system\n"
      "torn rotator cuff\tY3018\t2\tCOM\tDisorder of musculoskeletal system\n"
      "plantar fasciitis\tY3019\t2\tCOM\tDisorder of musculoskeletal system\n"
      "acid reflux disease\tY3020\t2\tCOM\tDisorder of digestive system\n"
      "irritable bowel syndrome\tY3021\t2\tCOM\tDisorder of digestive system\n"
      "gallstones\tY3022\t2\tCOM\tDisorder of digestive system\n"
      "ulcerative colitis\tY3023\t2\tCOM\tDisorder of digestive system\n"
      "celiac disease\tY3024\t2\tCOM\tDisorder of digestive system\n"
      "kidney stones\tY3025\t2\tCOM\tDisorder of the genitourinary system\n"
      "urinary tract infection\tY3026\t2\tCOM\tDisorder of the genitourinary system\n"
      "overactive bladder\tY3027\t2\tCOM\tDisorder of the genitourinary system\n"
      "enlarged prostate\tY3028\t2\tCOM\tDisorder of the genitourinary system\n"
      "asthma\tY3029\t2\tCOM\tDisorder of respiratory system\n"
      "chronic bronchitis\tY3030\t2\tCOM\tDisorder of respiratory system\n"
      "sleep apnea\tY3031\t2\tCOM\tDisorder of respiratory system\n"
      "copd flare\tY3032\t2\tCOM\tDisorder of respiratory system\n"
      "pneumonia\tY3033\t2\tCOM\tDisorder of respiratory system\n"
      "breast cyst\tY3034\t2\tCOM\tDisorder of breast\n"
      "mastitis\tY3035\t2\tCOM\tDisorder of breast\n"
      "fibrocystic breast changes\tY3036\t2\tCOM\tDisorder of breast\n"
      "migraine disorder\tY3037\t2\tCOM\tDisorder of nervous system\n"
      "epilepsy\tY3038\t2\tCOM\tDisorder of nervous system\n"
      "peripheral neuropathy\tY3039\t2\tCOM\tDisorder of nervous system\n"
      "parkinsons disease\tY3040\t2\tCOM\tDisorder of nervous system\n"
      "multiple sclerosis\tY3041\t2\tCOM\tDisorder of nervous system\n"
      "high blood pressure\tY3042\t2\tCOM\tDisorder of cardiovascular system\n"
      "atrial fibrillation\tY3043\t2\tCOM\tDisorder of cardiovascular system\n"
      "coronary artery disease\tY3044\t2\tCOM\tDisorder of cardiovascular system\n"
      "heart failure\tY3045\t2\tCOM\tDisorder of cardiovascular system\n"
      "varicose veins\tY3046\t2\tCOM\tDisorder of cardiovascular system\n"
      "medication refill request\tY3047\t3\tCOM\tOthers\n"
      "flu shot request\tY3048\t3\tCOM\tOthers\n"
      "annual physical exam\tY3049\t3\tCOM\tOthers\n"
      "work note request\tY3050\t3\tCOM\tOthers\n"
      "referral paperwork\tY3051\t3\tCOM\tOthers\n";
  return tsv;
}

inline const ConceptDictionary& ConceptDictionary::builtin() {
  static const ConceptDictionary dict =
      ConceptDictionary::from_tsv_text(builtin_tsv(), "<builtin>");
  return dict;
}

}  // namespace medtag
